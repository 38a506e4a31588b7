#pragma once

#include <cmath>
#include <cstddef>

#include "geniemac/channel.hpp"

namespace geniemac {

/// Per-user rates of the successive-interference-cancellation scheme, in
/// bits per real channel use.
struct RateAllocation {
  Vector rates;
  /// Sum of `rates`.
  double sum = 0.0;
  /// Same sum evaluated through the telescoped closed form; a self-check.
  double telescoped = 0.0;
};

/// Rate of user i (zero-based, canonical labelling): receiver i decodes users
/// 0..i in order and treats users i+1.. as noise.
double sic_rate(const DegradedChannel& dc, std::size_t i);

RateAllocation sic_sum_rate(const DegradedChannel& dc);

/// ½ log2(1 + x), exact at x = 0.
inline double half_log2_1p(double x) { return 0.5 * std::log1p(x) / std::log(2.0); }

}  // namespace geniemac
