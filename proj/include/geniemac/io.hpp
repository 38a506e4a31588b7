#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geniemac/certificate.hpp"
#include "geniemac/channel.hpp"
#include "geniemac/genie_mac.hpp"

namespace geniemac {

/// One channel per JSON document, either
///   {"H": [[...], ...], "P": 1, "N": 1}  or  {"a": [...], "b": [...], "P": 1, "N": 1}
/// with an optional "label".
struct ChannelFile {
  std::string label;
  ChannelInstance channel;
  /// Present for the (a, b) form; H is then a b^T.
  std::optional<std::pair<Vector, Vector>> factors;
};

ChannelFile parse_channel_file(std::string_view text);
ChannelFile load_channel_file(const std::filesystem::path& path);
std::string to_json(const ChannelFile& file);

/// The (a, b) form is canonicalized directly; the H form goes through
/// factor_degraded. P and N are kept as given.
DegradedChannel degraded_form(const ChannelFile& file, double tol = kDefaultRankTolerance);

/// {"G": [[...]], "T": [[...]], "Sigma": [[...]] (optional, default I),
///  "subset": [1-based indices] (optional, default 1..k)}
struct InstanceFile {
  GenieMacInstance instance;
  /// Zero-based decoding order.
  std::vector<std::size_t> subset;
};

InstanceFile parse_instance_file(std::string_view text);
InstanceFile load_instance_file(const std::filesystem::path& path);
std::string to_json(const InstanceFile& file);

/// Certificate as an instance file in the channel's original units and
/// labelling (Sigma = N I, T columns sign-adjusted for flipped receivers,
/// subset = ascending-a^2 order), with the certificate matrices attached
/// under "certificate".
InstanceFile certificate_instance(const Certificate& cert, const DegradedChannel& dc);
std::string export_certificate(const Certificate& cert, const DegradedChannel& dc);

/// 17 significant digits; parses back to the same double.
std::string format_double(double v);

struct SweepSpec {
  std::size_t users = 3;
  std::size_t count = 10;
  std::uint64_t seed = 1;
  double gain_lo = 0.0;
  double gain_hi = 4.0;
  double power = 1.0;
  double noise = 1.0;
  bool degraded = true;
};

/// Columns: index,seed,digest,achievable_sum,closed_form,fstar,gap. The
/// achievable/closed_form/gap columns are empty for general channels.
inline constexpr std::string_view kSweepHeader = "index,seed,digest,achievable_sum,closed_form,fstar,gap";

/// One row per sampled channel in sample order; identical output for
/// identical arguments regardless of thread count.
std::string sweep_csv(const SweepSpec& spec, const OptimizerConfig& cfg);

/// Channel drawn for sample `index` of a sweep.
ChannelInstance sweep_sample(const SweepSpec& spec, std::size_t index, std::uint64_t* sample_seed = nullptr);

/// FNV-1a over the little-endian bytes of the gains, row major, as 16 hex digits.
std::string gains_digest(const Matrix& gains);

}  // namespace geniemac
