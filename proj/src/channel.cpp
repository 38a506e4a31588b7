#include "geniemac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace geniemac {

OrderedSubset::OrderedSubset(std::vector<std::size_t> indices, std::size_t users)
    : indices_(std::move(indices)) {
  if (indices_.empty()) throw Error(Errc::invalid_argument, "subset must not be empty");
  std::vector<bool> seen(users, false);
  for (std::size_t idx : indices_) {
    if (idx >= users) {
      throw Error(Errc::out_of_range, "index out of range: " + std::to_string(idx + 1) +
                                          " (channel has " + std::to_string(users) + " users)");
    }
    if (seen[idx]) throw Error(Errc::invalid_argument, "repeated index " + std::to_string(idx + 1));
    seen[idx] = true;
  }
}

OrderedSubset OrderedSubset::full(std::size_t users) {
  std::vector<std::size_t> idx(users);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return OrderedSubset(std::move(idx), users);
}

std::vector<std::size_t> OrderedSubset::complement(std::size_t users) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < users; ++u) {
    if (std::find(indices_.begin(), indices_.end(), u) == indices_.end()) out.push_back(u);
  }
  return out;
}

std::string OrderedSubset::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) os << ',';
    os << indices_[i] + 1;
  }
  return os.str();
}

ChannelInstance validate_channel(Matrix gains, double power, double noise) {
  if (gains.rows() != gains.cols()) {
    throw Error(Errc::invalid_argument, "H must be square, got " + std::to_string(gains.rows()) +
                                            "x" + std::to_string(gains.cols()));
  }
  if (gains.rows() < 1) throw Error(Errc::invalid_argument, "H must have at least one user");
  if (!gains.allFinite()) throw Error(Errc::invalid_argument, "H has non-finite entries");
  if (!std::isfinite(power) || power <= 0) throw Error(Errc::invalid_argument, "P must be positive");
  if (!std::isfinite(noise) || noise <= 0) throw Error(Errc::invalid_argument, "N must be positive");
  return ChannelInstance{std::move(gains), power, noise};
}

ChannelInstance normalize(const ChannelInstance& ch) {
  if (ch.power == ch.noise) return ChannelInstance{ch.gains, 1.0, 1.0};
  return ChannelInstance{ch.gains * std::sqrt(ch.power / ch.noise), 1.0, 1.0};
}

double singular_ratio(const Matrix& gains) {
  if (gains.rows() < 2 || gains.cols() < 2) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(gains);
  const Vector& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(1) / s(0);
}

namespace {

// Relabels users so a^2 is ascending. Ties keep their original relative order.
DegradedChannel sort_users(Vector a, Vector b, double power, double noise, std::vector<int> flip) {
  const auto k = static_cast<std::size_t>(a.size());
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i) * a(i) < a(j) * a(j); });
  DegradedChannel dc;
  dc.a.resize(a.size());
  dc.b.resize(b.size());
  dc.receiver_flip.resize(k);
  for (std::size_t p = 0; p < k; ++p) {
    dc.a(p) = a(order[p]);
    dc.b(p) = b(order[p]);
    dc.receiver_flip[p] = flip[order[p]];
  }
  dc.order = std::move(order);
  dc.power = power;
  dc.noise = noise;
  return dc;
}

}  // namespace

DegradedChannel make_degraded(const Vector& a, const Vector& b, double power, double noise) {
  if (a.size() != b.size() || a.size() < 1) {
    throw Error(Errc::invalid_argument, "a and b must have the same nonzero length");
  }
  if (!a.allFinite() || !b.allFinite()) throw Error(Errc::invalid_argument, "a, b have non-finite entries");
  if (!std::isfinite(power) || power <= 0) throw Error(Errc::invalid_argument, "P must be positive");
  if (!std::isfinite(noise) || noise <= 0) throw Error(Errc::invalid_argument, "N must be positive");
  Vector abs_a = a;
  std::vector<int> flip(static_cast<std::size_t>(a.size()), 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < 0) {
      abs_a(i) = -a(i);
      flip[static_cast<std::size_t>(i)] = -1;
    }
  }
  return sort_users(std::move(abs_a), b, power, noise, std::move(flip));
}

DegradedChannel factor_degraded(const ChannelInstance& ch, double tol) {
  const Eigen::Index k = ch.gains.rows();
  if (ch.gains.isZero(0.0)) {
    return make_degraded(Vector::Zero(k), Vector::Ones(k), ch.power, ch.noise);
  }
  Eigen::JacobiSVD<Matrix> svd(ch.gains, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double ratio = k > 1 ? s(1) / s(0) : 0.0;
  if (ratio > tol) {
    std::ostringstream os;
    os.precision(6);
    os << "channel is not degraded (sigma2/sigma1 = " << ratio << ")";
    throw Error(Errc::not_degraded, os.str());
  }
  Vector u = svd.matrixU().col(0);
  Vector v = svd.matrixV().col(0);
  // Joint sign: the largest |u_i| is positive.
  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  if (u(imax) < 0) {
    u = -u;
    v = -v;
  }
  const double vmax = v.cwiseAbs().maxCoeff();
  const Vector a = u * (s(0) * vmax);
  const Vector b = v / vmax;
  return make_degraded(a, b, ch.power, ch.noise);
}

DegradedChannel normalize(const DegradedChannel& dc) {
  DegradedChannel out = dc;
  if (dc.power != dc.noise) out.b = dc.b * std::sqrt(dc.power / dc.noise);
  out.power = 1.0;
  out.noise = 1.0;
  return out;
}

Matrix submatrix(const Matrix& gains, const OrderedSubset& subset) {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto r = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(i)]);
      const auto c = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(j)]);
      if (r >= gains.rows() || c >= gains.cols()) throw Error(Errc::out_of_range, "index out of range");
      out(i, j) = gains(r, c);
    }
  }
  return out;
}

Matrix submatrix(const ChannelInstance& ch, const OrderedSubset& subset) {
  return submatrix(ch.gains, subset);
}

}  // namespace geniemac
