#include "geniemac/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "geniemac/sic.hpp"
#include "parallel.hpp"
#include "seed.hpp"

namespace geniemac {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::parse, what); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) parse_fail("field " + field + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail("field " + field + " must be finite");
  return v;
}

Vector vector_field(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) parse_fail("field " + field + " must be a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], field);
  return v;
}

Matrix matrix_field(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) parse_fail("field " + field + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) parse_fail("field " + field + " must be an array of rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_fail("field " + field + " has ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], field);
    }
  }
  return m;
}

json to_json_value(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json_value(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

ChannelFile parse_channel_file(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) parse_fail("channel file must be a JSON object");
  const bool has_h = j.contains("H");
  const bool has_ab = j.contains("a") || j.contains("b");
  if (has_h == has_ab) parse_fail("channel file needs exactly one of H or (a, b)");
  if (!j.contains("P") || !j.contains("N")) parse_fail("channel file needs P and N");
  const double power = number(j["P"], "P");
  const double noise = number(j["N"], "N");

  ChannelFile out;
  if (j.contains("label")) {
    if (!j["label"].is_string()) parse_fail("field label must be a string");
    out.label = j["label"].get<std::string>();
  }
  if (has_h) {
    out.channel = validate_channel(matrix_field(j["H"], "H"), power, noise);
  } else {
    if (!j.contains("a") || !j.contains("b")) parse_fail("(a, b) form needs both a and b");
    Vector a = vector_field(j["a"], "a");
    Vector b = vector_field(j["b"], "b");
    if (a.size() != b.size()) parse_fail("a and b must have the same length");
    out.channel = validate_channel(a * b.transpose(), power, noise);
    out.factors = std::make_pair(std::move(a), std::move(b));
  }
  return out;
}

ChannelFile load_channel_file(const std::filesystem::path& path) { return parse_channel_file(read_file(path)); }

std::string to_json(const ChannelFile& file) {
  json j;
  if (!file.label.empty()) j["label"] = file.label;
  if (file.factors) {
    j["a"] = to_json_value(file.factors->first);
    j["b"] = to_json_value(file.factors->second);
  } else {
    j["H"] = to_json_value(file.channel.gains);
  }
  j["P"] = file.channel.power;
  j["N"] = file.channel.noise;
  return j.dump(2);
}

DegradedChannel degraded_form(const ChannelFile& file, double tol) {
  if (file.factors) {
    return make_degraded(file.factors->first, file.factors->second, file.channel.power, file.channel.noise);
  }
  return factor_degraded(file.channel, tol);
}

InstanceFile parse_instance_file(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) parse_fail("instance file must be a JSON object");
  if (!j.contains("G") || !j.contains("T")) parse_fail("instance file needs G and T");
  InstanceFile out;
  out.instance.G = matrix_field(j["G"], "G");
  out.instance.T = matrix_field(j["T"], "T");
  const Eigen::Index k = out.instance.G.cols();
  out.instance.Sigma = j.contains("Sigma") ? matrix_field(j["Sigma"], "Sigma") : Matrix::Identity(k, k);
  if (j.contains("subset")) {
    const json& s = j["subset"];
    if (!s.is_array()) parse_fail("field subset must be an array");
    for (const auto& e : s) {
      if (!e.is_number_integer() || e.get<long long>() < 1) parse_fail("subset entries must be positive integers");
      out.subset.push_back(static_cast<std::size_t>(e.get<long long>() - 1));
    }
  } else {
    for (Eigen::Index i = 0; i < k; ++i) out.subset.push_back(static_cast<std::size_t>(i));
  }
  check_dimensions(out.instance);
  if (out.subset.size() != out.instance.size()) {
    throw Error(Errc::invalid_argument, "instance is " + std::to_string(k) + "x" + std::to_string(k) +
                                            " but subset has " + std::to_string(out.subset.size()) + " entries");
  }
  return out;
}

InstanceFile load_instance_file(const std::filesystem::path& path) { return parse_instance_file(read_file(path)); }

namespace {

json instance_json(const InstanceFile& file) {
  json j;
  j["G"] = to_json_value(file.instance.G);
  j["Sigma"] = to_json_value(file.instance.Sigma);
  j["T"] = to_json_value(file.instance.T);
  json subset = json::array();
  for (std::size_t s : file.subset) subset.push_back(s + 1);
  j["subset"] = std::move(subset);
  return j;
}

}  // namespace

std::string to_json(const InstanceFile& file) { return instance_json(file).dump(2); }

InstanceFile certificate_instance(const Certificate& cert, const DegradedChannel& dc) {
  const Eigen::Index k = cert.T.cols();
  InstanceFile out;
  out.instance.G = cert.G * std::sqrt(dc.noise / dc.power);
  out.instance.Sigma = dc.noise * Matrix::Identity(k, k);
  out.instance.T = cert.T;
  for (Eigen::Index p = 0; p < k; ++p) {
    if (dc.receiver_flip[static_cast<std::size_t>(p)] < 0) out.instance.T.col(p) *= -1.0;
  }
  out.subset = dc.order;
  return out;
}

std::string export_certificate(const Certificate& cert, const DegradedChannel& dc) {
  json j = instance_json(certificate_instance(cert, dc));
  json c;
  c["a"] = to_json_value(cert.a);
  c["b"] = to_json_value(cert.b);
  c["c"] = to_json_value(cert.c);
  c["T"] = to_json_value(cert.T);
  c["D"] = to_json_value(cert.D);
  c["G"] = to_json_value(cert.G);
  c["V"] = to_json_value(cert.V);
  c["F"] = to_json_value(cert.F);
  c["bound_bits"] = cert.bound_bits;
  c["logdet_bits"] = cert.logdet_bits;
  j["certificate"] = std::move(c);
  j["units"] = "bits/channel use, log base 2";
  return j.dump(2);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string gains_digest(const Matrix& gains) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index r = 0; r < gains.rows(); ++r) {
    for (Eigen::Index c = 0; c < gains.cols(); ++c) {
      std::uint64_t bits = 0;
      const double v = gains(r, c);
      std::memcpy(&bits, &v, sizeof bits);
      for (int byte = 0; byte < 8; ++byte) {
        h ^= (bits >> (8 * byte)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ChannelInstance sweep_sample(const SweepSpec& spec, std::size_t index, std::uint64_t* sample_seed) {
  const std::uint64_t s = detail::mix_seed(spec.seed, index);
  if (sample_seed) *sample_seed = s;
  std::mt19937_64 rng(s);
  std::uniform_real_distribution<double> gain(spec.gain_lo, spec.gain_hi);
  const auto k = static_cast<Eigen::Index>(spec.users);
  Matrix h(k, k);
  if (spec.degraded) {
    Vector a(k), b(k);
    for (Eigen::Index i = 0; i < k; ++i) a(i) = gain(rng);
    for (Eigen::Index i = 0; i < k; ++i) b(i) = gain(rng);
    h = a * b.transpose();
  } else {
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) h(r, c) = gain(rng);
    }
  }
  return validate_channel(std::move(h), spec.power, spec.noise);
}

std::string sweep_csv(const SweepSpec& spec, const OptimizerConfig& cfg) {
  if (spec.users < 1) throw Error(Errc::invalid_argument, "sweep needs K >= 1");
  if (!(std::isfinite(spec.gain_lo) && std::isfinite(spec.gain_hi)) || spec.gain_lo > spec.gain_hi) {
    throw Error(Errc::invalid_argument, "sweep gain range must satisfy lo <= hi");
  }
  if (!(spec.power > 0.0) || !(spec.noise > 0.0)) throw Error(Errc::invalid_argument, "P and N must be positive");

  std::vector<std::string> rows(spec.count);
  detail::parallel_for(spec.count, worker_threads(), [&](std::size_t i) {
    std::uint64_t seed = 0;
    const ChannelInstance ch = sweep_sample(spec, i, &seed);
    std::string row = std::to_string(i) + "," + std::to_string(seed) + "," + gains_digest(ch.gains) + ",";
    if (spec.degraded) {
      const DegradedChannel dc = factor_degraded(ch);
      const double achievable = sic_sum_rate(dc).sum;
      const double closed_form = degraded_sum_capacity(dc);
      const BoundResult bound = optimize_subset(ch, OrderedSubset(dc.order, ch.users()), cfg);
      row += format_double(achievable) + "," + format_double(closed_form) + "," + format_double(bound.value_bits) +
             "," + format_double(bound.value_bits - closed_form);
    } else {
      const BoundResult bound = optimize_subset(ch, OrderedSubset::full(ch.users()), cfg);
      row += ",," + format_double(bound.value_bits) + ",";
    }
    rows[i] = std::move(row);
  });

  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r;
    out += '\n';
  }
  return out;
}

}  // namespace geniemac
