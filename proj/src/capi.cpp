#include "geniemac/geniemac.h"

#include <cstring>
#include <new>
#include <string>

#include "geniemac/certificate.hpp"
#include "geniemac/channel.hpp"
#include "geniemac/genie_mac.hpp"
#include "geniemac/io.hpp"
#include "geniemac/sic.hpp"

using namespace geniemac;

struct gm_channel {
  ChannelFile rep;
};

struct gm_degraded {
  DegradedChannel rep;
};

struct gm_certificate {
  Certificate rep;
};

struct gm_instance {
  InstanceFile rep;
};

struct gm_bound {
  BoundResult rep;
};

struct gm_region {
  std::vector<SubsetBound> rep;
};

namespace {

thread_local std::string last_error;

gm_status to_status(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return GM_ERR_INVALID_ARGUMENT;
    case Errc::not_degraded: return GM_ERR_NOT_DEGRADED;
    case Errc::not_positive_definite: return GM_ERR_NOT_POSITIVE_DEFINITE;
    case Errc::out_of_range: return GM_ERR_OUT_OF_RANGE;
    case Errc::parse: return GM_ERR_PARSE;
    case Errc::io: return GM_ERR_IO;
    case Errc::too_many_orderings: return GM_ERR_TOO_MANY_ORDERINGS;
  }
  return GM_ERR_INTERNAL;
}

template <typename Fn>
gm_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return GM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return GM_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw Error(Errc::invalid_argument, what);
}

Matrix read_square(const double* values, std::size_t k) {
  require(values != nullptr, "null matrix pointer");
  Matrix m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * k + c];
  }
  return m;
}

Vector read_vector(const double* values, std::size_t k) {
  require(values != nullptr, "null vector pointer");
  Vector v(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

void write_matrix(const Matrix& m, double* out) {
  require(out != nullptr, "null output pointer");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  }
}

void write_vector(const Vector& v, double* out) {
  require(out != nullptr, "null output pointer");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

OptimizerConfig to_config(const gm_optimizer_config* cfg) {
  OptimizerConfig out;
  if (cfg) {
    out.starts = cfg->starts;
    out.seed = cfg->seed;
    out.max_iters = cfg->max_iters;
    out.tol = cfg->tol;
    out.cond_limit = cfg->cond_limit;
  }
  return out;
}

void fill(const FeasibilityReport& r, gm_feasibility_report* out) {
  require(out != nullptr, "null report pointer");
  out->upper_residual = r.upper_residual;
  out->noise_excess = r.noise_excess;
  out->sigma_min_eigenvalue = r.sigma_min_eigenvalue;
  out->upper_ok = r.upper_ok;
  out->noise_ok = r.noise_ok;
  out->sigma_ok = r.sigma_ok;
  out->feasible = r.feasible();
}

constexpr const char* kCheckNames[GM_CHECK_COUNT] = {"structure", "unit_norm",  "projection",  "upper_match",
                                                     "hypothesis", "vf_lower", "vf_diagonal", "determinant"};

}  // namespace

extern "C" {

const char* gm_version(void) { return "0.1.0"; }

const char* gm_status_name(gm_status status) {
  switch (status) {
    case GM_OK: return "ok";
    case GM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GM_ERR_NOT_DEGRADED: return "not degraded";
    case GM_ERR_NOT_POSITIVE_DEFINITE: return "not positive-definite";
    case GM_ERR_OUT_OF_RANGE: return "out of range";
    case GM_ERR_PARSE: return "parse error";
    case GM_ERR_IO: return "i/o error";
    case GM_ERR_TOO_MANY_ORDERINGS: return "too many orderings";
    case GM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gm_last_error(void) { return last_error.c_str(); }

void gm_string_free(char* str) { delete[] str; }

// ---- channels

gm_status gm_channel_create(size_t users, const double* gains, double power, double noise, gm_channel** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(users >= 1, "H must have at least one user");
    auto ch = std::make_unique<gm_channel>();
    ch->rep.channel = validate_channel(read_square(gains, users), power, noise);
    *out = ch.release();
  });
}

gm_status gm_channel_create_factored(size_t users, const double* a, const double* b, double power, double noise,
                                     gm_channel** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(users >= 1, "channel must have at least one user");
    auto ch = std::make_unique<gm_channel>();
    Vector av = read_vector(a, users);
    Vector bv = read_vector(b, users);
    ch->rep.channel = validate_channel(av * bv.transpose(), power, noise);
    ch->rep.factors = std::make_pair(std::move(av), std::move(bv));
    *out = ch.release();
  });
}

gm_status gm_channel_load(const char* path, gm_channel** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new gm_channel{load_channel_file(path)};
  });
}

gm_status gm_channel_parse(const char* text, gm_channel** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new gm_channel{parse_channel_file(text)};
  });
}

void gm_channel_destroy(gm_channel* ch) { delete ch; }

size_t gm_channel_users(const gm_channel* ch) { return ch ? ch->rep.channel.users() : 0; }
double gm_channel_power(const gm_channel* ch) { return ch ? ch->rep.channel.power : 0.0; }
double gm_channel_noise(const gm_channel* ch) { return ch ? ch->rep.channel.noise : 0.0; }
const char* gm_channel_label(const gm_channel* ch) { return ch ? ch->rep.label.c_str() : ""; }

gm_status gm_channel_gains(const gm_channel* ch, double* gains_out) {
  return guarded([&] {
    require(ch != nullptr, "null channel");
    write_matrix(ch->rep.channel.gains, gains_out);
  });
}

gm_status gm_channel_normalize(const gm_channel* ch, gm_channel** out) {
  return guarded([&] {
    require(ch != nullptr && out != nullptr, "null argument");
    ChannelFile f = ch->rep;
    const double scale = std::sqrt(f.channel.power / f.channel.noise);
    f.channel = normalize(f.channel);
    if (f.factors) f.factors->second *= scale;
    *out = new gm_channel{std::move(f)};
  });
}

gm_status gm_channel_singular_ratio(const gm_channel* ch, double* out) {
  return guarded([&] {
    require(ch != nullptr && out != nullptr, "null argument");
    *out = singular_ratio(ch->rep.channel.gains);
  });
}

gm_status gm_channel_to_json(const gm_channel* ch, char** json_out) {
  return guarded([&] {
    require(ch != nullptr && json_out != nullptr, "null argument");
    *json_out = dup_string(to_json(ch->rep));
  });
}

// ---- degraded

gm_status gm_channel_factor(const gm_channel* ch, double tol, gm_degraded** out, double* ratio_out) {
  return guarded([&] {
    require(ch != nullptr && out != nullptr, "null argument");
    if (ratio_out) *ratio_out = ch->rep.factors ? 0.0 : singular_ratio(ch->rep.channel.gains);
    *out = new gm_degraded{degraded_form(ch->rep, tol)};
  });
}

gm_status gm_degraded_create(size_t users, const double* a, const double* b, double power, double noise,
                             gm_degraded** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(users >= 1, "channel must have at least one user");
    *out = new gm_degraded{make_degraded(read_vector(a, users), read_vector(b, users), power, noise)};
  });
}

void gm_degraded_destroy(gm_degraded* dc) { delete dc; }

size_t gm_degraded_users(const gm_degraded* dc) { return dc ? dc->rep.users() : 0; }
double gm_degraded_power(const gm_degraded* dc) { return dc ? dc->rep.power : 0.0; }
double gm_degraded_noise(const gm_degraded* dc) { return dc ? dc->rep.noise : 0.0; }

gm_status gm_degraded_factors(const gm_degraded* dc, double* a_out, double* b_out) {
  return guarded([&] {
    require(dc != nullptr, "null degraded channel");
    if (a_out) write_vector(dc->rep.a, a_out);
    if (b_out) write_vector(dc->rep.b, b_out);
  });
}

gm_status gm_degraded_order(const gm_degraded* dc, size_t* order_out, int* flip_out) {
  return guarded([&] {
    require(dc != nullptr, "null degraded channel");
    for (std::size_t p = 0; p < dc->rep.users(); ++p) {
      if (order_out) order_out[p] = dc->rep.order[p];
      if (flip_out) flip_out[p] = dc->rep.receiver_flip[p];
    }
  });
}

gm_status gm_sic_rate(const gm_degraded* dc, size_t i, double* out) {
  return guarded([&] {
    require(dc != nullptr && out != nullptr, "null argument");
    *out = sic_rate(dc->rep, i);
  });
}

gm_status gm_sic_sum_rate(const gm_degraded* dc, double* rates_out, double* sum_out, double* telescoped_out) {
  return guarded([&] {
    require(dc != nullptr, "null degraded channel");
    const RateAllocation r = sic_sum_rate(dc->rep);
    if (rates_out) write_vector(r.rates, rates_out);
    if (sum_out) *sum_out = r.sum;
    if (telescoped_out) *telescoped_out = r.telescoped;
  });
}

gm_status gm_degraded_sum_capacity(const gm_degraded* dc, double* out) {
  return guarded([&] {
    require(dc != nullptr && out != nullptr, "null argument");
    *out = degraded_sum_capacity(dc->rep);
  });
}

int gm_degraded_dof(const gm_degraded* dc) { return dc ? dof(dc->rep) : 0; }

// ---- certificates

gm_status gm_certificate_build(const gm_degraded* dc, gm_certificate** out) {
  return guarded([&] {
    require(dc != nullptr && out != nullptr, "null argument");
    *out = new gm_certificate{build_certificate(dc->rep)};
  });
}

void gm_certificate_destroy(gm_certificate* cert) { delete cert; }

size_t gm_certificate_users(const gm_certificate* cert) {
  return cert ? static_cast<size_t>(cert->rep.a.size()) : 0;
}

namespace {

Vector* vector_part(Certificate& c, gm_cert_part part) {
  switch (part) {
    case GM_CERT_A: return &c.a;
    case GM_CERT_B: return &c.b;
    case GM_CERT_C: return &c.c;
    default: return nullptr;
  }
}

Matrix* matrix_part(Certificate& c, gm_cert_part part) {
  switch (part) {
    case GM_CERT_T: return &c.T;
    case GM_CERT_D: return &c.D;
    case GM_CERT_G: return &c.G;
    case GM_CERT_V: return &c.V;
    case GM_CERT_F: return &c.F;
    default: return nullptr;
  }
}

}  // namespace

gm_status gm_certificate_get(const gm_certificate* cert, gm_cert_part part, double* out) {
  return guarded([&] {
    require(cert != nullptr, "null certificate");
    auto& c = const_cast<Certificate&>(cert->rep);
    if (const Vector* v = vector_part(c, part)) {
      write_vector(*v, out);
    } else if (const Matrix* m = matrix_part(c, part)) {
      write_matrix(*m, out);
    } else {
      throw Error(Errc::invalid_argument, "unknown certificate part");
    }
  });
}

gm_status gm_certificate_set(gm_certificate* cert, gm_cert_part part, const double* values) {
  return guarded([&] {
    require(cert != nullptr, "null certificate");
    const auto k = static_cast<std::size_t>(cert->rep.a.size());
    if (Vector* v = vector_part(cert->rep, part)) {
      *v = read_vector(values, k);
    } else if (Matrix* m = matrix_part(cert->rep, part)) {
      *m = read_square(values, k);
    } else {
      throw Error(Errc::invalid_argument, "unknown certificate part");
    }
  });
}

gm_status gm_certificate_bound(const gm_certificate* cert, double* vf_bits, double* logdet_bits) {
  return guarded([&] {
    require(cert != nullptr, "null certificate");
    if (vf_bits) *vf_bits = cert->rep.bound_bits;
    if (logdet_bits) *logdet_bits = cert->rep.logdet_bits;
  });
}

gm_status gm_certificate_verify(const gm_certificate* cert, const gm_degraded* dc, double tol,
                                gm_certificate_report* report) {
  return guarded([&] {
    require(cert != nullptr && dc != nullptr && report != nullptr, "null argument");
    const CertificateReport r = verify_certificate(cert->rep, dc->rep, tol);
    for (int i = 0; i < GM_CHECK_COUNT; ++i) {
      const CertificateCheck* c = r.find(kCheckNames[i]);
      report->residual[i] = c ? c->residual : std::numeric_limits<double>::infinity();
      report->passed[i] = c ? c->passed : 0;
    }
    report->max_residual = r.max_residual;
    report->all_passed = r.passed;
  });
}

const char* gm_cert_check_name(gm_cert_check check) {
  if (check < 0 || check >= GM_CHECK_COUNT) return "";
  return kCheckNames[check];
}

gm_status gm_certificate_export(const gm_certificate* cert, const gm_degraded* dc, char** json_out) {
  return guarded([&] {
    require(cert != nullptr && dc != nullptr && json_out != nullptr, "null argument");
    require(cert->rep.a.size() == dc->rep.a.size(), "certificate and channel sizes differ");
    *json_out = dup_string(export_certificate(cert->rep, dc->rep));
  });
}

// ---- instances

gm_status gm_instance_create(size_t k, const double* g, const double* sigma, const double* t, const size_t* subset,
                             gm_instance** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(k >= 1, "instance must be at least 1x1");
    InstanceFile f;
    f.instance.G = read_square(g, k);
    f.instance.T = read_square(t, k);
    const auto ki = static_cast<Eigen::Index>(k);
    f.instance.Sigma = sigma ? read_square(sigma, k) : Matrix::Identity(ki, ki);
    for (std::size_t i = 0; i < k; ++i) f.subset.push_back(subset ? subset[i] : i);
    *out = new gm_instance{std::move(f)};
  });
}

gm_status gm_instance_load(const char* path, gm_instance** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{load_instance_file(path)};
  });
}

gm_status gm_instance_parse(const char* text, gm_instance** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{parse_instance_file(text)};
  });
}

void gm_instance_destroy(gm_instance* inst) { delete inst; }

size_t gm_instance_size(const gm_instance* inst) { return inst ? inst->rep.instance.size() : 0; }

gm_status gm_instance_get(const gm_instance* inst, gm_instance_part part, double* out) {
  return guarded([&] {
    require(inst != nullptr, "null instance");
    switch (part) {
      case GM_INST_G: write_matrix(inst->rep.instance.G, out); break;
      case GM_INST_SIGMA: write_matrix(inst->rep.instance.Sigma, out); break;
      case GM_INST_T: write_matrix(inst->rep.instance.T, out); break;
      default: throw Error(Errc::invalid_argument, "unknown instance part");
    }
  });
}

gm_status gm_instance_subset(const gm_instance* inst, size_t* subset_out) {
  return guarded([&] {
    require(inst != nullptr && subset_out != nullptr, "null argument");
    std::copy(inst->rep.subset.begin(), inst->rep.subset.end(), subset_out);
  });
}

gm_status gm_instance_to_json(const gm_instance* inst, char** json_out) {
  return guarded([&] {
    require(inst != nullptr && json_out != nullptr, "null argument");
    *json_out = dup_string(to_json(inst->rep));
  });
}

gm_status gm_mac_sum_capacity(const gm_instance* inst, double power, double* out) {
  return guarded([&] {
    require(inst != nullptr && out != nullptr, "null argument");
    require(power > 0.0, "P must be positive");
    *out = mac_sum_capacity(inst->rep.instance, power);
  });
}

gm_status gm_check_feasible(const gm_instance* inst, const gm_channel* ch, double tol,
                            gm_feasibility_report* report) {
  return guarded([&] {
    require(inst != nullptr && ch != nullptr, "null argument");
    const OrderedSubset subset(inst->rep.subset, ch->rep.channel.users());
    fill(check_feasible(inst->rep.instance, submatrix(ch->rep.channel, subset), ch->rep.channel.noise, tol), report);
  });
}

gm_status gm_whiten(const gm_instance* inst, gm_instance** out) {
  return guarded([&] {
    require(inst != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{InstanceFile{whiten(inst->rep.instance), inst->rep.subset}};
  });
}

gm_status gm_to_T_identity(const gm_instance* inst, double eps, double noise, gm_instance** out) {
  return guarded([&] {
    require(inst != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{InstanceFile{to_T_identity(inst->rep.instance, eps, noise), inst->rep.subset}};
  });
}

gm_status gm_to_G_identity(const gm_instance* inst, double eps, gm_instance** out) {
  return guarded([&] {
    require(inst != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{InstanceFile{to_G_identity(inst->rep.instance, eps), inst->rep.subset}};
  });
}

// ---- optimizer

gm_optimizer_config gm_optimizer_config_default(void) {
  const OptimizerConfig d;
  return gm_optimizer_config{d.starts, d.seed, d.max_iters, d.tol, d.cond_limit};
}

gm_status gm_bound_optimize(const gm_channel* ch, const size_t* subset, size_t k, const gm_optimizer_config* cfg,
                            gm_bound** out) {
  return guarded([&] {
    require(ch != nullptr && subset != nullptr && out != nullptr, "null argument");
    const OrderedSubset s(std::vector<std::size_t>(subset, subset + k), ch->rep.channel.users());
    *out = new gm_bound{optimize_subset(ch->rep.channel, s, to_config(cfg))};
  });
}

void gm_bound_destroy(gm_bound* bound) { delete bound; }
double gm_bound_value(const gm_bound* bound) { return bound ? bound->rep.value_bits : 0.0; }
int gm_bound_converged(const gm_bound* bound) { return bound ? bound->rep.converged : 0; }
size_t gm_bound_size(const gm_bound* bound) { return bound ? bound->rep.subset.size() : 0; }

gm_status gm_bound_subset(const gm_bound* bound, size_t* subset_out) {
  return guarded([&] {
    require(bound != nullptr && subset_out != nullptr, "null argument");
    const auto& idx = bound->rep.subset.indices();
    std::copy(idx.begin(), idx.end(), subset_out);
  });
}

gm_status gm_bound_instance(const gm_bound* bound, gm_instance** out) {
  return guarded([&] {
    require(bound != nullptr && out != nullptr, "null argument");
    *out = new gm_instance{InstanceFile{bound->rep.instance, bound->rep.subset.indices()}};
  });
}

gm_status gm_bound_feasibility(const gm_bound* bound, gm_feasibility_report* report) {
  return guarded([&] {
    require(bound != nullptr, "null bound");
    fill(bound->rep.residuals, report);
  });
}

gm_status gm_region_compute(const gm_channel* ch, size_t max_k, const gm_optimizer_config* cfg, int force,
                            gm_region** out) {
  return guarded([&] {
    require(ch != nullptr && out != nullptr, "null argument");
    *out = new gm_region{region_outer_bound(ch->rep.channel, max_k, to_config(cfg), force != 0)};
  });
}

void gm_region_destroy(gm_region* region) { delete region; }
size_t gm_region_count(const gm_region* region) { return region ? region->rep.size() : 0; }

gm_status gm_region_entry(const gm_region* region, size_t index, size_t* size_out, size_t* members_out,
                          size_t* best_order_out, double* value_out, int* converged_out) {
  return guarded([&] {
    require(region != nullptr, "null region");
    if (index >= region->rep.size()) throw Error(Errc::out_of_range, "region entry out of range");
    const SubsetBound& sb = region->rep[index];
    if (size_out) *size_out = sb.members.size();
    if (members_out) std::copy(sb.members.begin(), sb.members.end(), members_out);
    if (best_order_out) {
      const auto& idx = sb.best.subset.indices();
      std::copy(idx.begin(), idx.end(), best_order_out);
    }
    if (value_out) *value_out = sb.best.value_bits;
    if (converged_out) *converged_out = sb.best.converged;
  });
}

size_t gm_region_ordering_count(const gm_region* region, size_t index) {
  if (!region || index >= region->rep.size()) return 0;
  return region->rep[index].orderings.size();
}

gm_status gm_region_ordering(const gm_region* region, size_t index, size_t ordering, size_t* order_out,
                             double* value_out) {
  return guarded([&] {
    require(region != nullptr, "null region");
    if (index >= region->rep.size() || ordering >= region->rep[index].orderings.size()) {
      throw Error(Errc::out_of_range, "region ordering out of range");
    }
    const OrderingBound& ob = region->rep[index].orderings[ordering];
    if (order_out) std::copy(ob.ordering.indices().begin(), ob.ordering.indices().end(), order_out);
    if (value_out) *value_out = ob.value_bits;
  });
}

// ---- sweeps

gm_sweep_spec gm_sweep_spec_default(void) {
  const SweepSpec d;
  return gm_sweep_spec{d.users, d.count, d.seed, d.gain_lo, d.gain_hi, d.power, d.noise, d.degraded ? 1 : 0};
}

const char* gm_sweep_header(void) { return kSweepHeader.data(); }

gm_status gm_sweep_csv(const gm_sweep_spec* spec, const gm_optimizer_config* cfg, char** csv_out) {
  return guarded([&] {
    require(spec != nullptr && csv_out != nullptr, "null argument");
    SweepSpec s;
    s.users = spec->users;
    s.count = spec->count;
    s.seed = spec->seed;
    s.gain_lo = spec->gain_lo;
    s.gain_hi = spec->gain_hi;
    s.power = spec->power;
    s.noise = spec->noise;
    s.degraded = spec->degraded != 0;
    *csv_out = dup_string(sweep_csv(s, to_config(cfg)));
  });
}

}  // extern "C"
