#pragma once

#include <string>
#include <vector>

#include "geniemac/channel.hpp"

namespace geniemac {

/// Closed-form genie-MAC point (G, T) for a degraded channel with P = N = 1,
/// plus the auxiliary matrices that certify its objective value.
///
/// With c_i = sqrt(a_i^2 - a_{i-1}^2):
///  - T is upper triangular with unit columns and t_i^T c = a_i,
///  - G(i, j) = c_i b_j D(i, j) with D(i, j) = 1 on and above the diagonal,
///  - V is unit lower triangular and V F is upper triangular, F = I + G G^T,
/// so log|F| is the sum of log (V F)_{ii}.
struct Certificate {
  /// Normalized (P = N = 1) channel the certificate was built from.
  Vector a;
  Vector b;
  Vector c;
  Matrix T;
  Matrix D;
  Matrix G;
  Matrix V;
  Matrix F;
  /// ½ sum log2 (V F)_{ii}.
  double bound_bits = 0.0;
  /// ½ log2 |F| from a Cholesky factorization of F; independent of V.
  double logdet_bits = 0.0;
};

Vector build_c(const Vector& a);
Matrix build_T(const Vector& a, const Vector& c);
Matrix solve_D(const Vector& b, const Vector& c);
Matrix build_G(const Vector& b, const Vector& c, const Matrix& D);
Matrix build_V(const Vector& b, const Vector& c);

/// Normalizes `dc` and assembles every part of the certificate.
Certificate build_certificate(const DegradedChannel& dc);

struct CertificateCheck {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;
  double max_residual = 0.0;
  bool passed = false;

  const CertificateCheck* find(const std::string& name) const;
};

inline constexpr double kDefaultCertificateTolerance = 1e-9;

/// Checks, in this order: structure, unit_norm, projection (t_i^T c = a_i),
/// upper_match ((T^T G)^+ = (a b^T)^+), hypothesis (sum_m v_{im} c_m d_{mn}
/// = 0 for n < i), vf_lower, vf_diagonal and determinant (bound_bits vs
/// logdet_bits). Failures are reported, never thrown.
CertificateReport verify_certificate(const Certificate& cert, const DegradedChannel& dc,
                                     double tol = kDefaultCertificateTolerance);

/// Sum capacity of the degraded channel for general P, N, in bits.
double degraded_sum_capacity(const DegradedChannel& dc);

/// 1 for a nonzero channel, 0 for the zero channel.
int dof(const DegradedChannel& dc);

}  // namespace geniemac
