#include "geniemac/certificate.hpp"

#include <algorithm>
#include <cmath>

#include "geniemac/sic.hpp"

namespace geniemac {

namespace {

Vector tail_energy(const Vector& b) {
  const Eigen::Index k = b.size();
  Vector tail = Vector::Zero(k + 1);
  for (Eigen::Index i = k - 1; i >= 0; --i) tail(i) = tail(i + 1) + b(i) * b(i);
  return tail;
}

// head[i] = sum_{m < i} c_m^2, i.e. a_{i-1}^2 up to rounding.
Vector head_energy(const Vector& c) {
  const Eigen::Index k = c.size();
  Vector head = Vector::Zero(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) head(i + 1) = head(i) + c(i) * c(i);
  return head;
}

double log2_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum() / std::log(2.0);
}

}  // namespace

Vector build_c(const Vector& a) {
  Vector c(a.size());
  double prev = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double a2 = a(i) * a(i);
    if (a2 < prev) {
      throw Error(Errc::invalid_argument,
                  "a^2 must be ascending (a_" + std::to_string(i + 1) + "^2 < a_" + std::to_string(i) + "^2)");
    }
    c(i) = std::sqrt(a2 - prev);
    prev = a2;
  }
  return c;
}

Matrix build_T(const Vector& a, const Vector& c) {
  const Eigen::Index k = a.size();
  Matrix t = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ai = std::abs(a(i));
    if (ai == 0.0) {
      t(i, i) = 1.0;
      continue;
    }
    if (i > 0) t.col(i).head(i) = (std::abs(a(i - 1)) / ai) * t.col(i - 1).head(i);
    t(i, i) = c(i) / ai;
  }
  return t;
}

Matrix solve_D(const Vector& b, const Vector& c) {
  const Eigen::Index k = c.size();
  const Vector tail = tail_energy(b);
  const Vector head = head_energy(c);
  Matrix d = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) d.row(i).tail(k - i).setOnes();
  // Column n is a forward substitution in i = n+1..K-1.
  for (Eigen::Index n = 0; n < k; ++n) {
    double weighted = 0.0;  // sum_{m < i} c_m^2 d_{m,n}
    for (Eigen::Index m = 0; m <= n; ++m) weighted += c(m) * c(m);
    for (Eigen::Index i = n + 1; i < k; ++i) {
      d(i, n) = weighted * tail(i) / (head(i) * tail(i) + 1.0);
      weighted += c(i) * c(i) * d(i, n);
    }
  }
  return d;
}

Matrix build_G(const Vector& b, const Vector& c, const Matrix& D) {
  return c.asDiagonal() * D * b.asDiagonal();
}

Matrix build_V(const Vector& b, const Vector& c) {
  const Eigen::Index k = c.size();
  const Vector tail = tail_energy(b);
  const Vector head = head_energy(c);
  Matrix v = Matrix::Identity(k, k);
  for (Eigen::Index i = 1; i < k; ++i) {
    const double scale = -c(i) * tail(i) / (head(i) * tail(i) + 1.0);
    for (Eigen::Index j = 0; j < i; ++j) v(i, j) = scale * c(j);
  }
  return v;
}

Certificate build_certificate(const DegradedChannel& dc) {
  const DegradedChannel unit = normalize(dc);
  Certificate cert;
  cert.a = unit.a;
  cert.b = unit.b;
  cert.c = build_c(unit.a);
  cert.T = build_T(unit.a, cert.c);
  cert.D = solve_D(unit.b, cert.c);
  cert.G = build_G(unit.b, cert.c, cert.D);
  cert.V = build_V(unit.b, cert.c);
  const Eigen::Index k = cert.a.size();
  cert.F = Matrix::Identity(k, k) + cert.G * cert.G.transpose();
  const Matrix vf = cert.V * cert.F;
  cert.bound_bits = 0.5 * vf.diagonal().array().log().sum() / std::log(2.0);
  cert.logdet_bits = 0.5 * log2_det_spd(cert.F);
  return cert;
}

const CertificateCheck* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

CertificateReport verify_certificate(const Certificate& cert, const DegradedChannel& dc, double tol) {
  const DegradedChannel unit = normalize(dc);
  const Eigen::Index k = unit.a.size();
  CertificateReport report;
  auto add = [&](const std::string& name, double residual) {
    report.checks.push_back({name, residual, std::isfinite(residual) && residual <= tol});
  };

  const bool shapes_ok = cert.T.rows() == k && cert.T.cols() == k && cert.G.rows() == k &&
                         cert.G.cols() == k && cert.V.rows() == k && cert.V.cols() == k &&
                         cert.D.rows() == k && cert.D.cols() == k && cert.c.size() == k;
  if (!shapes_ok) {
    add("shape", std::numeric_limits<double>::infinity());
    report.max_residual = std::numeric_limits<double>::infinity();
    return report;
  }

  // T upper triangular, V unit lower triangular.
  double r = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    r = std::max(r, std::abs(cert.V(i, i) - 1.0));
    for (Eigen::Index j = 0; j < i; ++j) r = std::max({r, std::abs(cert.T(i, j)), std::abs(cert.V(j, i))});
  }
  add("structure", r);

  r = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) r = std::max(r, std::abs(cert.T.col(i).norm() - 1.0));
  add("unit_norm", r);

  r = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) r = std::max(r, std::abs(cert.T.col(i).dot(cert.c) - unit.a(i)));
  add("projection", r);

  const Matrix tg = cert.T.transpose() * cert.G;
  r = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) r = std::max(r, std::abs(tg(i, j) - unit.a(i) * unit.b(j)));
  }
  add("upper_match", r);

  r = 0.0;
  for (Eigen::Index i = 1; i < k; ++i) {
    for (Eigen::Index n = 0; n < i; ++n) {
      double s = 0.0;
      for (Eigen::Index m = 0; m <= i; ++m) s += cert.V(i, m) * cert.c(m) * cert.D(m, n);
      r = std::max(r, std::abs(s));
    }
  }
  add("hypothesis", r);

  const Matrix f = Matrix::Identity(k, k) + cert.G * cert.G.transpose();
  const Matrix vf = cert.V * f;
  r = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) r = std::max(r, std::abs(vf(i, j)));
  }
  add("vf_lower", r);

  r = 0.0;
  double prev_a2 = 0.0;
  double tail = unit.b.squaredNorm();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a2 = unit.a(i) * unit.a(i);
    const double expected = 1.0 + (a2 - prev_a2) * tail / (prev_a2 * tail + 1.0);
    r = std::max(r, std::abs(vf(i, i) - expected));
    prev_a2 = a2;
    tail -= unit.b(i) * unit.b(i);
    if (tail < 0.0) tail = 0.0;
  }
  add("vf_diagonal", r);

  const double by_vf = 0.5 * vf.diagonal().array().log().sum() / std::log(2.0);
  add("determinant", std::abs(by_vf - 0.5 * log2_det_spd(f)));

  report.passed = true;
  for (const auto& c : report.checks) {
    report.max_residual = std::max(report.max_residual, c.residual);
    report.passed = report.passed && c.passed;
  }
  return report;
}

double degraded_sum_capacity(const DegradedChannel& dc) {
  const Eigen::Index k = dc.a.size();
  const Vector tail = tail_energy(dc.b);
  double total = 0.0;
  double prev_a2 = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a2 = dc.a(i) * dc.a(i);
    const double gain = (a2 - prev_a2) * tail(i) * dc.power;
    if (gain != 0.0) total += half_log2_1p(gain / (prev_a2 * tail(i) * dc.power + dc.noise));
    prev_a2 = a2;
  }
  return total;
}

int dof(const DegradedChannel& dc) {
  return (dc.a.cwiseAbs().maxCoeff() > 0.0 && dc.b.cwiseAbs().maxCoeff() > 0.0) ? 1 : 0;
}

}  // namespace geniemac
