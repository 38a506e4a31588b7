#include "geniemac/sic.hpp"

#include <cmath>
#include <string>

namespace geniemac {

namespace {

// tail[i] = sum_{j >= i} b_j^2, with tail[K] = 0.
Vector tail_energy(const Vector& b) {
  const Eigen::Index k = b.size();
  Vector tail = Vector::Zero(k + 1);
  for (Eigen::Index i = k - 1; i >= 0; --i) tail(i) = tail(i + 1) + b(i) * b(i);
  return tail;
}

double rate_from_tail(const DegradedChannel& dc, const Vector& tail, Eigen::Index i) {
  const double a2 = dc.a(i) * dc.a(i);
  const double signal = a2 * dc.b(i) * dc.b(i) * dc.power;
  if (signal == 0.0) return 0.0;
  return half_log2_1p(signal / (a2 * tail(i + 1) * dc.power + dc.noise));
}

}  // namespace

double sic_rate(const DegradedChannel& dc, std::size_t i) {
  if (i >= dc.users()) {
    throw Error(Errc::out_of_range, "user index " + std::to_string(i + 1) + " out of range");
  }
  return rate_from_tail(dc, tail_energy(dc.b), static_cast<Eigen::Index>(i));
}

RateAllocation sic_sum_rate(const DegradedChannel& dc) {
  const Eigen::Index k = dc.a.size();
  const Vector tail = tail_energy(dc.b);
  RateAllocation out;
  out.rates.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.rates(i) = rate_from_tail(dc, tail, i);
    out.sum += out.rates(i);
  }
  double prev_a2 = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a2 = dc.a(i) * dc.a(i);
    const double gain = (a2 - prev_a2) * tail(i) * dc.power;
    // a_i == a_{i-1} contributes exactly zero.
    if (gain != 0.0) out.telescoped += half_log2_1p(gain / (prev_a2 * tail(i) * dc.power + dc.noise));
    prev_a2 = a2;
  }
  return out;
}

}  // namespace geniemac
