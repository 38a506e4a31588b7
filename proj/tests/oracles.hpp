#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double half_log2(double x) { return 0.5 * std::log2(x); }

/// log2 |M| by Gaussian elimination with partial pivoting, written out by
/// hand so it shares nothing with Eigen's LLT/LU.
inline double log2_det(Matrix m) {
  const Eigen::Index n = m.rows();
  double acc = 0.0;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    }
    if (m(piv, col) == 0.0) return -INFINITY;
    if (piv != col) {
      for (Eigen::Index c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
    }
    acc += std::log2(std::abs(m(col, col)));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      for (Eigen::Index c = col; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return acc;
}

/// ½ log2 |I + P S^{-1} G G^T| through explicit inverse and the hand LU.
inline double mac_sum_capacity(const Matrix& g, const Matrix& sigma, double power) {
  const Eigen::Index k = g.rows();
  const Matrix m = Matrix::Identity(k, k) + power * sigma.inverse() * g * g.transpose();
  return 0.5 * log2_det(m);
}

/// Per-user SIC rate from the receiver's own row of H: users before i are
/// already cancelled, users after i are Gaussian noise.
inline double sic_rate_from_row(const Matrix& h, Eigen::Index i, double power, double noise) {
  double interference = 0.0;
  for (Eigen::Index j = i + 1; j < h.cols(); ++j) interference += h(i, j) * h(i, j) * power;
  const double signal = h(i, i) * h(i, i) * power;
  return half_log2((signal + interference + noise) / (interference + noise));
}

/// Product form of the degraded sum capacity:
/// ½ log2 prod_i (a_i^2 B_i P + N) / prod_i (a_{i-1}^2 B_i P + N).
inline double degraded_product_form(const Vector& a, const Vector& b, double power, double noise) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double tail = 0.0;
    for (Eigen::Index j = i; j < b.size(); ++j) tail += b(j) * b(j);
    const double prev = i > 0 ? a(i - 1) * a(i - 1) : 0.0;
    num += std::log2(a(i) * a(i) * tail * power + noise);
    den += std::log2(prev * tail * power + noise);
  }
  return 0.5 * (num - den);
}

/// Classical two-user degraded result: the weak receiver treats user 2 as
/// noise, the strong receiver sees user 2 interference-free.
inline double two_user_degraded(double a1, double a2, double b1, double b2, double power, double noise) {
  return half_log2(1.0 + a1 * a1 * b1 * b1 * power / (a1 * a1 * b2 * b2 * power + noise)) +
         half_log2(1.0 + a2 * a2 * b2 * b2 * power / noise);
}

struct DegradedSample {
  Vector a;
  Vector b;
  double power = 1.0;
  double noise = 1.0;
};

/// K in [1, max_k], gains uniform in [0, 4] with a sorted ascending, and one
/// deliberate tie a_i = a_{i+1} in roughly 10% of samples.
inline DegradedSample degraded_sample(std::mt19937_64& rng, int max_k, bool random_snr) {
  std::uniform_int_distribution<int> users(1, max_k);
  std::uniform_real_distribution<double> gain(0.0, 4.0);
  std::uniform_real_distribution<double> snr(0.1, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DegradedSample s;
  const int k = users(rng);
  s.a.resize(k);
  s.b.resize(k);
  for (int i = 0; i < k; ++i) s.a(i) = gain(rng);
  for (int i = 0; i < k; ++i) s.b(i) = gain(rng);
  std::sort(s.a.data(), s.a.data() + k);
  if (k > 1 && unit(rng) < 0.1) {
    std::uniform_int_distribution<int> pos(0, k - 2);
    const int i = pos(rng);
    s.a(i + 1) = s.a(i);
  }
  if (random_snr) {
    s.power = snr(rng);
    s.noise = snr(rng);
  }
  return s;
}

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

/// Symmetric positive definite with eigenvalues bounded away from zero.
inline Matrix spd(std::mt19937_64& rng, Eigen::Index k) {
  const Matrix m = gaussian(rng, k, k);
  return m * m.transpose() + 0.5 * Matrix::Identity(k, k);
}

/// Unit-norm columns, condition number kept moderate by starting near I.
inline Matrix unit_columns(std::mt19937_64& rng, Eigen::Index k, double spread = 0.5) {
  Matrix t = Matrix::Identity(k, k) + gaussian(rng, k, k, spread);
  for (Eigen::Index j = 0; j < k; ++j) t.col(j).normalize();
  return t;
}

/// unit_columns redrawn until the smallest singular value is at least min_sv.
inline Matrix conditioned_unit_columns(std::mt19937_64& rng, Eigen::Index k, double min_sv = 0.25) {
  for (;;) {
    Matrix t = unit_columns(rng, k);
    Eigen::JacobiSVD<Matrix> svd(t);
    if (svd.singularValues()(k - 1) >= min_sv) return t;
  }
}

/// Strictly lower triangular.
inline Matrix strictly_lower(std::mt19937_64& rng, Eigen::Index k, double sd = 1.0) {
  Matrix l = gaussian(rng, k, k, sd);
  return l.triangularView<Eigen::StrictlyLower>();
}

}  // namespace oracle
