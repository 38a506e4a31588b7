#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geniemac/error.hpp"

namespace geniemac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative second-singular-value threshold below which a gain matrix is
/// treated as rank one.
inline constexpr double kDefaultRankTolerance = 1e-9;

/// K-user real Gaussian interference channel: receiver i sees
/// sum_j gains(i, j) * X_j plus noise of variance `noise`; every
/// transmitter has power `power`.
struct ChannelInstance {
  Matrix gains;
  double power = 1.0;
  double noise = 1.0;

  std::size_t users() const { return static_cast<std::size_t>(gains.rows()); }
};

/// Rank-one channel H = a b^T with a >= 0 and a^2 ascending.
///
/// `order[p]` is the original user index placed at position p, and
/// `receiver_flip[p]` is -1 when receiver order[p] was negated to make a_p
/// nonnegative (+1 otherwise). With those applied,
///   H(order[p], order[q]) == receiver_flip[p] * a[p] * b[q].
struct DegradedChannel {
  Vector a;
  Vector b;
  double power = 1.0;
  double noise = 1.0;
  std::vector<std::size_t> order;
  std::vector<int> receiver_flip;

  std::size_t users() const { return static_cast<std::size_t>(a.size()); }
  /// Gain matrix in the canonical (sorted, sign-flipped) labelling.
  Matrix canonical_gains() const { return a * b.transpose(); }
};

/// Decoding-order tuple of distinct, zero-based user indices.
class OrderedSubset {
 public:
  OrderedSubset() = default;
  /// Throws out_of_range for an index >= users and invalid_argument for
  /// repeats or an empty tuple.
  OrderedSubset(std::vector<std::size_t> indices, std::size_t users);

  static OrderedSubset full(std::size_t users);

  std::size_t size() const { return indices_.size(); }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  /// Remaining users, ascending.
  std::vector<std::size_t> complement(std::size_t users) const;
  /// One-based, comma separated ("2,1,3").
  std::string to_string() const;

  friend bool operator==(const OrderedSubset&, const OrderedSubset&) = default;

 private:
  std::vector<std::size_t> indices_;
};

ChannelInstance validate_channel(Matrix gains, double power, double noise);

/// Equivalent channel with P = N = 1 and gains scaled by sqrt(P/N).
ChannelInstance normalize(const ChannelInstance& ch);

/// Rank-one factorization by SVD. Throws Errc::not_degraded when
/// sigma_2 / sigma_1 > tol. The scale is fixed by max_j |b_j| = 1.
DegradedChannel factor_degraded(const ChannelInstance& ch, double tol = kDefaultRankTolerance);

/// Canonicalizes an explicit (a, b) pair: negative a_i become receiver sign
/// flips and users are relabelled so that a^2 is ascending.
DegradedChannel make_degraded(const Vector& a, const Vector& b, double power, double noise);

/// P = N = 1 form of a degraded channel; b absorbs sqrt(P/N) so the order of
/// a is untouched.
DegradedChannel normalize(const DegradedChannel& dc);

/// sigma_2 / sigma_1 of the gain matrix (0 for K = 1 or H = 0).
double singular_ratio(const Matrix& gains);

/// H_S with (i, j) entry h_{S(i), S(j)}.
Matrix submatrix(const ChannelInstance& ch, const OrderedSubset& subset);
Matrix submatrix(const Matrix& gains, const OrderedSubset& subset);

}  // namespace geniemac
