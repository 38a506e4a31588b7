#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "geniemac/channel.hpp"

namespace geniemac {

/// Genie receiver observing G X_S + Z with Z ~ N(0, Sigma), together with the
/// combining vectors T (one column per decoded user). Square, m = k = |S|.
struct GenieMacInstance {
  Matrix G;
  Matrix Sigma;
  Matrix T;

  std::size_t size() const { return static_cast<std::size_t>(G.cols()); }
};

/// Throws invalid_argument unless G, Sigma and T are all k x k.
void check_dimensions(const GenieMacInstance& gm);

/// ½ log2 |I + P Sigma^{-1} G G^T|, evaluated as ½ log2 |I + P L^{-1} G G^T L^{-T}|
/// with Sigma = L L^T. Throws not_positive_definite.
double mac_sum_capacity(const GenieMacInstance& gm, double power);

struct FeasibilityReport {
  /// max_{i <= j} |(T^T G)_{ij} - (H_S)_{ij}|
  double upper_residual = 0.0;
  /// max_i (t_i^T Sigma t_i - N); <= 0 when the noise constraint holds.
  double noise_excess = 0.0;
  /// Smallest eigenvalue of the symmetric part of Sigma.
  double sigma_min_eigenvalue = 0.0;
  /// max |Sigma - Sigma^T|
  double sigma_asymmetry = 0.0;
  bool upper_ok = false;
  bool noise_ok = false;
  bool sigma_ok = false;

  bool feasible() const { return upper_ok && noise_ok && sigma_ok; }
};

FeasibilityReport check_feasible(const GenieMacInstance& gm, const Matrix& target, double noise, double tol);

/// (A^{-1} G, I, A^T T) with Sigma = A A^T (Cholesky). Preserves T^T G, the
/// quadratic forms t_i^T Sigma t_i and the objective.
GenieMacInstance whiten(const GenieMacInstance& gm);

/// Whitened input (Sigma = I) to (T^T G, eps N I + (1 - eps) T^T T, I).
/// Throws invalid_argument unless 0 < eps < 1 and Sigma = I.
GenieMacInstance to_T_identity(const GenieMacInstance& gm, double eps, double noise = 1.0);

/// Whitened input to (I, (eps I + G^T G)^{-1}, G^T T).
GenieMacInstance to_G_identity(const GenieMacInstance& gm, double eps);

/// G = T^{-T} (target^+ + slack) with slack strictly lower triangular, so
/// that (T^T G)^+ = target^+ by construction. T must be invertible.
Matrix eliminate_G(const Matrix& T, const Matrix& target, const Matrix& slack);

struct OptimizerConfig {
  int starts = 8;
  std::uint64_t seed = 1;
  int max_iters = 2000;
  /// Relative objective decrease over `stall_window` iterations below which
  /// a start is considered converged.
  double tol = 1e-9;
  double cond_limit = 1e8;
  int stall_window = 25;
};

/// Best point found for one ordered subset. The value is always an outer
/// bound on the sum rate of S since the instance is feasible; it is not
/// claimed to be the infimum.
struct BoundResult {
  double value_bits = 0.0;
  OrderedSubset subset;
  /// Minimizer in the channel's own units: Sigma = N I.
  GenieMacInstance instance;
  bool converged = false;
  int best_start = 0;
  int iterations = 0;
  FeasibilityReport residuals;
  /// Best value reached by every start, in start order.
  std::vector<double> start_values;
};

/// Locally minimizes ½ log2 |I + (P/N) G G^T| over unit-norm T and
/// strictly-lower slack with G eliminated. Start 0 is the receiver-cooperation
/// point (T = I, G = H_S).
BoundResult optimize_fstar(const Matrix& target, double power, double noise, const OptimizerConfig& cfg = {});

/// optimize_fstar on H_S of `ch`.
BoundResult optimize_subset(const ChannelInstance& ch, const OrderedSubset& subset,
                            const OptimizerConfig& cfg = {});

struct OrderingBound {
  OrderedSubset ordering;
  double value_bits = 0.0;
};

/// Bound for an unordered index set: the minimum over its orderings.
struct SubsetBound {
  /// Ascending member indices.
  std::vector<std::size_t> members;
  BoundResult best;
  std::vector<OrderingBound> orderings;
};

inline constexpr std::size_t kMaxEnumeratedUsers = 8;

/// Every subset of size <= max_k, every ordering of it. Throws
/// too_many_orderings when max_k > 8 unless `force`.
std::vector<SubsetBound> region_outer_bound(const ChannelInstance& ch, std::size_t max_k,
                                            const OptimizerConfig& cfg = {}, bool force = false);

/// Worker count: GENIE_MAC_THREADS when set and positive, else hardware
/// concurrency.
unsigned worker_threads();

}  // namespace geniemac
