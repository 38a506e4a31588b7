// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geniemac/geniemac.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

constexpr const char* kUnitsHeader = "# rates in bits/channel use, log base 2";

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ChannelPtr = std::unique_ptr<gm_channel, Deleter<gm_channel, gm_channel_destroy>>;
using DegradedPtr = std::unique_ptr<gm_degraded, Deleter<gm_degraded, gm_degraded_destroy>>;
using CertificatePtr = std::unique_ptr<gm_certificate, Deleter<gm_certificate, gm_certificate_destroy>>;
using InstancePtr = std::unique_ptr<gm_instance, Deleter<gm_instance, gm_instance_destroy>>;
using BoundPtr = std::unique_ptr<gm_bound, Deleter<gm_bound, gm_bound_destroy>>;
using RegionPtr = std::unique_ptr<gm_region, Deleter<gm_region, gm_region_destroy>>;

struct CApiString {
  char* p = nullptr;
  ~CApiString() { gm_string_free(p); }
};

// Thrown to unwind with a specific exit code after the message was printed.
struct Exit {
  int code;
};

int exit_code_for(gm_status s) {
  switch (s) {
    case GM_OK: return kExitOk;
    case GM_ERR_NOT_DEGRADED:
    case GM_ERR_NOT_POSITIVE_DEFINITE: return kExitDomain;
    default: return kExitUsage;
  }
}

void check(gm_status s) {
  if (s == GM_OK) return;
  std::fprintf(stderr, "error: %s\n", gm_last_error());
  throw Exit{exit_code_for(s)};
}

std::string num(double v, bool csv) {
  char buf[40];
  std::snprintf(buf, sizeof buf, csv ? "%.17g" : "%.12g", v);
  return buf;
}

std::string join_one_based(const std::vector<size_t>& idx, char sep = ',') {
  std::string out;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(idx[i] + 1);
  }
  return out;
}

struct CommonOptions {
  double tol = 1e-9;
  uint64_t seed = 1;
  int starts = 8;
  int max_iters = 2000;
  bool csv = false;
  bool force = false;

  gm_optimizer_config optimizer() const {
    gm_optimizer_config cfg = gm_optimizer_config_default();
    cfg.seed = seed;
    cfg.starts = starts;
    cfg.max_iters = max_iters;
    return cfg;
  }
};

ChannelPtr load_channel(const std::string& path) {
  gm_channel* ch = nullptr;
  check(gm_channel_load(path.c_str(), &ch));
  return ChannelPtr(ch);
}

DegradedPtr factor(const gm_channel* ch, double tol) {
  gm_degraded* dc = nullptr;
  double ratio = 0.0;
  const gm_status s = gm_channel_factor(ch, tol, &dc, &ratio);
  check(s);
  return DegradedPtr(dc);
}

void print_channel_header(const gm_channel* ch) {
  std::printf("%s\n", kUnitsHeader);
  const std::string label = gm_channel_label(ch);
  std::printf("# channel%s%s: K=%zu P=%s N=%s\n", label.empty() ? "" : " ", label.c_str(), gm_channel_users(ch),
              num(gm_channel_power(ch), false).c_str(), num(gm_channel_noise(ch), false).c_str());
}

struct DegradedView {
  size_t k = 0;
  std::vector<double> a, b, rates;
  std::vector<size_t> order;
  std::vector<int> flip;
  double sum = 0.0, telescoped = 0.0, capacity = 0.0;
  int dof = 0;
};

DegradedView describe(const gm_degraded* dc) {
  DegradedView v;
  v.k = gm_degraded_users(dc);
  v.a.resize(v.k);
  v.b.resize(v.k);
  v.rates.resize(v.k);
  v.order.resize(v.k);
  v.flip.resize(v.k);
  check(gm_degraded_factors(dc, v.a.data(), v.b.data()));
  check(gm_degraded_order(dc, v.order.data(), v.flip.data()));
  check(gm_sic_sum_rate(dc, v.rates.data(), &v.sum, &v.telescoped));
  check(gm_degraded_sum_capacity(dc, &v.capacity));
  v.dof = gm_degraded_dof(dc);
  return v;
}

void print_rates(const DegradedView& v, bool csv) {
  if (csv) {
    std::printf("position,user,a,b,rate\n");
    for (size_t p = 0; p < v.k; ++p) {
      std::printf("%zu,%zu,%s,%s,%s\n", p + 1, v.order[p] + 1, num(v.a[p], true).c_str(), num(v.b[p], true).c_str(),
                  num(v.rates[p], true).c_str());
    }
    std::printf("sum,,,,%s\n", num(v.sum, true).c_str());
    return;
  }
  std::printf("%-8s %-6s %-18s %-18s %s\n", "decode", "user", "a", "b", "rate");
  for (size_t p = 0; p < v.k; ++p) {
    std::printf("%-8zu %-6zu %-18s %-18s %s\n", p + 1, v.order[p] + 1, num(v.a[p], false).c_str(),
                num(v.b[p], false).c_str(), num(v.rates[p], false).c_str());
  }
  std::printf("achievable_sum %s\n", num(v.sum, false).c_str());
}

bool print_certificate_report(const gm_certificate* cert, const gm_degraded* dc, double tol, bool csv) {
  gm_certificate_report report{};
  check(gm_certificate_verify(cert, dc, tol, &report));
  double vf_bits = 0.0, logdet_bits = 0.0;
  check(gm_certificate_bound(cert, &vf_bits, &logdet_bits));
  if (csv) {
    std::printf("check,residual,passed\n");
    for (int i = 0; i < GM_CHECK_COUNT; ++i) {
      std::printf("%s,%s,%d\n", gm_cert_check_name(static_cast<gm_cert_check>(i)),
                  num(report.residual[i], true).c_str(), report.passed[i]);
    }
    std::printf("bound_vf,%s,\nbound_logdet,%s,\n", num(vf_bits, true).c_str(), num(logdet_bits, true).c_str());
  } else {
    std::printf("certificate %s (max residual %.3g, tol %.3g)\n", report.all_passed ? "PASS" : "FAIL",
                report.max_residual, tol);
    for (int i = 0; i < GM_CHECK_COUNT; ++i) {
      std::printf("  %-12s %-12.3g %s\n", gm_cert_check_name(static_cast<gm_cert_check>(i)), report.residual[i],
                  report.passed[i] ? "ok" : "FAIL");
    }
    std::printf("certificate_bound %s (logdet %s)\n", num(vf_bits, false).c_str(), num(logdet_bits, false).c_str());
  }
  return report.all_passed != 0;
}

int cmd_sumcap(const std::string& path, const CommonOptions& opt) {
  auto ch = load_channel(path);
  auto dc = factor(ch.get(), opt.tol);
  const DegradedView v = describe(dc.get());
  CertificatePtr cert;
  {
    gm_certificate* c = nullptr;
    check(gm_certificate_build(dc.get(), &c));
    cert.reset(c);
  }
  if (opt.csv) {
    std::printf("%s\n", kUnitsHeader);
    print_rates(v, true);
    std::printf("quantity,value\nachievable_sum,%s\nsum_capacity,%s\ndof,%d\n", num(v.sum, true).c_str(),
                num(v.capacity, true).c_str(), v.dof);
  } else {
    print_channel_header(ch.get());
    print_rates(v, false);
    std::printf("sum_capacity   %s\n", num(v.capacity, false).c_str());
    std::printf("dof            %d\n", v.dof);
  }
  const bool ok = print_certificate_report(cert.get(), dc.get(), opt.tol, opt.csv);
  return ok ? kExitOk : kExitDomain;
}

int cmd_rates(const std::string& path, const CommonOptions& opt) {
  auto ch = load_channel(path);
  auto dc = factor(ch.get(), opt.tol);
  const DegradedView v = describe(dc.get());
  if (!opt.csv) print_channel_header(ch.get());
  else std::printf("%s\n", kUnitsHeader);
  print_rates(v, opt.csv);
  return kExitOk;
}

int cmd_certificate(const std::string& path, const std::string& out_path, const CommonOptions& opt) {
  auto ch = load_channel(path);
  auto dc = factor(ch.get(), opt.tol);
  gm_certificate* c = nullptr;
  check(gm_certificate_build(dc.get(), &c));
  CertificatePtr cert(c);
  gm_certificate_report report{};
  check(gm_certificate_verify(cert.get(), dc.get(), opt.tol, &report));
  CApiString json;
  check(gm_certificate_export(cert.get(), dc.get(), &json.p));
  if (out_path.empty() || out_path == "-") {
    std::printf("%s\n", json.p);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
      return kExitUsage;
    }
    std::fprintf(f, "%s\n", json.p);
    std::fclose(f);
    std::fprintf(stderr, "certificate %s (max residual %.3g) written to %s\n", report.all_passed ? "PASS" : "FAIL",
                 report.max_residual, out_path.c_str());
  }
  return report.all_passed ? kExitOk : kExitDomain;
}

std::vector<size_t> parse_subset(const std::string& spec) {
  std::vector<size_t> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0' || v < 1) {
      std::fprintf(stderr, "error: bad subset entry '%s' (expected 1-based indices like 1,3,2)\n", item.c_str());
      throw Exit{kExitUsage};
    }
    out.push_back(static_cast<size_t>(v - 1));
  }
  return out;
}

int cmd_bound(const std::string& path, const std::string& spec, const std::string& export_path,
              const CommonOptions& opt) {
  auto ch = load_channel(path);
  const size_t users = gm_channel_users(ch.get());
  const gm_optimizer_config cfg = opt.optimizer();

  if (spec == "all" || spec.rfind("size=", 0) == 0) {
    size_t only = 0;
    size_t max_k = users;
    if (spec != "all") {
      const long v = std::strtol(spec.c_str() + 5, nullptr, 10);
      if (v < 1 || static_cast<size_t>(v) > users) {
        std::fprintf(stderr, "error: size must lie in [1, %zu]\n", users);
        return kExitUsage;
      }
      only = max_k = static_cast<size_t>(v);
    }
    gm_region* r = nullptr;
    check(gm_region_compute(ch.get(), max_k, &cfg, opt.force ? 1 : 0, &r));
    RegionPtr region(r);
    if (opt.csv) {
      std::printf("subset,best_order,bound_bits,converged,orderings\n");
    } else {
      print_channel_header(ch.get());
      std::printf("%-16s %-16s %-20s %s\n", "subset", "best_order", "bound", "converged");
    }
    for (size_t i = 0; i < gm_region_count(region.get()); ++i) {
      size_t size = 0;
      std::vector<size_t> members(users), order(users);
      double value = 0.0;
      int converged = 0;
      check(gm_region_entry(region.get(), i, &size, members.data(), order.data(), &value, &converged));
      if (only && size != only) continue;
      members.resize(size);
      order.resize(size);
      if (opt.csv) {
        std::string per;
        for (size_t j = 0; j < gm_region_ordering_count(region.get(), i); ++j) {
          std::vector<size_t> o(size);
          double ov = 0.0;
          check(gm_region_ordering(region.get(), i, j, o.data(), &ov));
          if (j) per += ';';
          per += join_one_based(o, ' ') + ":" + num(ov, true);
        }
        std::printf("\"%s\",\"%s\",%s,%d,%s\n", join_one_based(members).c_str(), join_one_based(order).c_str(),
                    num(value, true).c_str(), converged, per.c_str());
      } else {
        std::printf("%-16s %-16s %-20s %s\n", ("{" + join_one_based(members) + "}").c_str(),
                    ("(" + join_one_based(order) + ")").c_str(), num(value, false).c_str(),
                    converged ? "yes" : "no");
      }
    }
    return kExitOk;
  }

  const std::vector<size_t> subset = parse_subset(spec);
  gm_bound* b = nullptr;
  check(gm_bound_optimize(ch.get(), subset.data(), subset.size(), &cfg, &b));
  BoundPtr bound(b);
  gm_feasibility_report feas{};
  check(gm_bound_feasibility(bound.get(), &feas));
  const double value = gm_bound_value(bound.get());
  if (opt.csv) {
    std::printf("subset,bound_bits,converged,upper_residual,noise_excess\n");
    std::printf("\"%s\",%s,%d,%s,%s\n", join_one_based(subset).c_str(), num(value, true).c_str(),
                gm_bound_converged(bound.get()), num(feas.upper_residual, true).c_str(),
                num(feas.noise_excess, true).c_str());
  } else {
    print_channel_header(ch.get());
    std::printf("subset (%s)\n", join_one_based(subset).c_str());
    std::printf("bound          %s\n", num(value, false).c_str());
    std::printf("converged      %s\n", gm_bound_converged(bound.get()) ? "yes" : "no");
    std::printf("feasible       %s (upper residual %.3g, noise excess %.3g)\n", feas.feasible ? "yes" : "no",
                feas.upper_residual, feas.noise_excess);
  }
  if (!export_path.empty()) {
    gm_instance* inst = nullptr;
    check(gm_bound_instance(bound.get(), &inst));
    InstancePtr holder(inst);
    CApiString json;
    check(gm_instance_to_json(holder.get(), &json.p));
    std::FILE* f = std::fopen(export_path.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "error: cannot write %s\n", export_path.c_str());
      return kExitUsage;
    }
    std::fprintf(f, "%s\n", json.p);
    std::fclose(f);
  }
  return kExitOk;
}

int cmd_verify(const std::string& path, const std::string& instance_path, const CommonOptions& opt) {
  auto ch = load_channel(path);
  gm_instance* inst = nullptr;
  check(gm_instance_load(instance_path.c_str(), &inst));
  InstancePtr instance(inst);
  gm_feasibility_report feas{};
  check(gm_check_feasible(instance.get(), ch.get(), opt.tol, &feas));
  double value = 0.0;
  check(gm_mac_sum_capacity(instance.get(), gm_channel_power(ch.get()), &value));
  std::vector<size_t> subset(gm_instance_size(instance.get()));
  check(gm_instance_subset(instance.get(), subset.data()));
  if (opt.csv) {
    std::printf("subset,feasible,upper_residual,noise_excess,sigma_min_eigenvalue,bound_bits\n");
    std::printf("\"%s\",%d,%s,%s,%s,%s\n", join_one_based(subset).c_str(), feas.feasible,
                num(feas.upper_residual, true).c_str(), num(feas.noise_excess, true).c_str(),
                num(feas.sigma_min_eigenvalue, true).c_str(), num(value, true).c_str());
  } else {
    print_channel_header(ch.get());
    std::printf("subset         (%s)\n", join_one_based(subset).c_str());
    std::printf("upper_match    %-12.3g %s\n", feas.upper_residual, feas.upper_ok ? "ok" : "FAIL");
    std::printf("noise_excess   %-12.3g %s\n", feas.noise_excess, feas.noise_ok ? "ok" : "FAIL");
    std::printf("sigma_min_eig  %-12.3g %s\n", feas.sigma_min_eigenvalue, feas.sigma_ok ? "ok" : "FAIL");
    std::printf("feasible       %s\n", feas.feasible ? "yes" : "no");
    std::printf("bound          %s\n", num(value, false).c_str());
  }
  return feas.feasible ? kExitOk : kExitDomain;
}

int cmd_sweep(const gm_sweep_spec& spec, const CommonOptions& opt) {
  const gm_optimizer_config cfg = opt.optimizer();
  CApiString csv;
  check(gm_sweep_csv(&spec, &cfg, &csv.p));
  std::fputs(csv.p, stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum capacity and genie-MAC outer bounds for K-user Gaussian interference channels.\n"
               "All rates are in bits per real channel use (log base 2).\n"
               "Exit codes: 0 success/feasible, 1 usage or input error, 2 domain error\n"
               "(channel not degraded, Sigma not positive-definite, infeasible instance,\n"
               "certificate check failed).",
               "geniemac"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gm_version());

  CommonOptions opt;
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", opt.tol, "rank-1 / residual tolerance")->capture_default_str();
  };
  auto add_optimizer = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "optimizer seed")->capture_default_str();
    sub->add_option("--starts", opt.starts, "optimizer starts")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", opt.max_iters, "iterations per start")->capture_default_str()->check(CLI::PositiveNumber);
  };

  std::string channel_path, instance_path, out_path, subset_spec, export_path;

  auto* sumcap = app.add_subcommand("sumcap", "sum capacity, SIC rates and certificate check of a degraded channel");
  sumcap->add_option("file", channel_path, "channel file")->required();
  add_tol(sumcap);
  sumcap->add_flag("--csv", opt.csv, "CSV output");

  auto* rates = app.add_subcommand("rates", "per-user SIC rates of a degraded channel");
  rates->add_option("file", channel_path, "channel file")->required();
  add_tol(rates);
  rates->add_flag("--csv", opt.csv, "CSV output");

  auto* certificate = app.add_subcommand("certificate", "build, verify and export the closed-form certificate");
  certificate->add_option("file", channel_path, "channel file")->required();
  certificate->add_option("-o,--output", out_path, "output instance file ('-' for stdout)");
  add_tol(certificate);

  auto* bound = app.add_subcommand("bound", "numerical genie-MAC bound f*(H_S)");
  bound->add_option("file", channel_path, "channel file")->required();
  bound->add_option("subset", subset_spec, "ordered subset like 1,3,2 or 'all' or 'size=k'")->required();
  bound->add_option("--export", export_path, "write the minimizing instance (ordered subsets only)");
  bound->add_flag("--csv", opt.csv,
                  "CSV output; region columns: subset,best_order,bound_bits,converged,orderings");
  bound->add_flag("--force", opt.force, "allow enumerating orderings of more than 8 users");
  add_optimizer(bound);

  auto* verify = app.add_subcommand("verify", "check a genie-MAC instance file against a channel");
  verify->add_option("file", channel_path, "channel file")->required();
  verify->add_option("instance", instance_path, "instance file (G, T, optional Sigma, subset)")->required();
  add_tol(verify);
  verify->add_flag("--csv", opt.csv, "CSV output");

  gm_sweep_spec spec = gm_sweep_spec_default();
  std::string mode = "degraded";
  auto* sweep = app.add_subcommand(
      "sweep",
      "CSV over random channels. Columns: index,seed,digest,achievable_sum,closed_form,fstar,gap\n"
      "(digest = FNV-1a of the gains; achievable_sum/closed_form/gap empty for general channels;\n"
      "floats with 17 significant digits).");
  sweep->add_option("-K,--users", spec.users, "users")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--count", spec.count, "channels")->capture_default_str();
  sweep->add_option("--lo", spec.gain_lo, "lowest gain")->capture_default_str();
  sweep->add_option("--hi", spec.gain_hi, "highest gain")->capture_default_str();
  sweep->add_option("--power,-P", spec.power, "transmit power")->capture_default_str();
  sweep->add_option("--noise,-N", spec.noise, "noise variance")->capture_default_str();
  sweep->add_option("--mode", mode, "degraded | general")->capture_default_str()->check(
      CLI::IsMember({"degraded", "general"}));
  sweep->add_flag("--csv", opt.csv, "accepted for symmetry; sweep output is always CSV");
  add_optimizer(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sumcap) return cmd_sumcap(channel_path, opt);
    if (*rates) return cmd_rates(channel_path, opt);
    if (*certificate) return cmd_certificate(channel_path, out_path, opt);
    if (*bound) return cmd_bound(channel_path, subset_spec, export_path, opt);
    if (*verify) return cmd_verify(channel_path, instance_path, opt);
    if (*sweep) {
      spec.seed = opt.seed;
      spec.degraded = mode == "degraded";
      return cmd_sweep(spec, opt);
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitUsage;
}
