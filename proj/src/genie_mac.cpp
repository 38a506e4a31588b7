#include "geniemac/genie_mac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "parallel.hpp"
#include "seed.hpp"

namespace geniemac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

Eigen::LLT<Matrix> cholesky(const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success || !sigma.isApprox(sigma.transpose(), 1e-12)) {
    throw Error(Errc::not_positive_definite, "Sigma not positive-definite");
  }
  return llt;
}

// ½ log2 |I + M M^T|, NaN when the factorization fails.
double half_log2_det_gram(const Matrix& m) {
  const Eigen::Index k = m.rows();
  Matrix f = Matrix::Identity(k, k);
  f.selfadjointView<Eigen::Lower>().rankUpdate(m);
  Eigen::LLT<Matrix> llt(f);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return llt.matrixLLT().diagonal().array().log().sum() / kLn2;
}

Matrix upper_part(const Matrix& m) { return m.triangularView<Eigen::Upper>(); }

}  // namespace

void check_dimensions(const GenieMacInstance& gm) {
  const Eigen::Index k = gm.G.cols();
  if (k < 1 || gm.G.rows() != k || gm.T.rows() != k || gm.T.cols() != k || gm.Sigma.rows() != k ||
      gm.Sigma.cols() != k) {
    throw Error(Errc::invalid_argument, "G, Sigma and T must all be " + std::to_string(k) + "x" +
                                            std::to_string(k));
  }
}

double mac_sum_capacity(const GenieMacInstance& gm, double power) {
  check_dimensions(gm);
  const auto llt = cholesky(gm.Sigma);
  const Matrix whitened = llt.matrixL().solve(gm.G) * std::sqrt(power);
  return half_log2_det_gram(whitened);
}

FeasibilityReport check_feasible(const GenieMacInstance& gm, const Matrix& target, double noise, double tol) {
  check_dimensions(gm);
  if (target.rows() != gm.G.cols() || target.cols() != gm.G.cols()) {
    throw Error(Errc::invalid_argument, "instance is " + std::to_string(gm.G.cols()) + "x" +
                                            std::to_string(gm.G.cols()) + " but H_S is " +
                                            std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  }
  FeasibilityReport r;
  const Matrix tg = gm.T.transpose() * gm.G;
  r.upper_residual = (upper_part(tg) - upper_part(target)).cwiseAbs().maxCoeff();
  r.noise_excess = -kInf;
  for (Eigen::Index i = 0; i < gm.T.cols(); ++i) {
    r.noise_excess = std::max(r.noise_excess, gm.T.col(i).dot(gm.Sigma * gm.T.col(i)) - noise);
  }
  r.sigma_asymmetry = (gm.Sigma - gm.Sigma.transpose()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (gm.Sigma + gm.Sigma.transpose());
  r.sigma_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
  r.upper_ok = r.upper_residual <= tol;
  r.noise_ok = r.noise_excess <= tol;
  r.sigma_ok = r.sigma_min_eigenvalue > 0.0 && r.sigma_asymmetry <= tol;
  return r;
}

GenieMacInstance whiten(const GenieMacInstance& gm) {
  check_dimensions(gm);
  const auto llt = cholesky(gm.Sigma);
  const Eigen::Index k = gm.G.cols();
  GenieMacInstance out;
  out.G = llt.matrixL().solve(gm.G);
  out.T = llt.matrixU() * gm.T;
  out.Sigma = Matrix::Identity(k, k);
  return out;
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
}

void check_whitened(const GenieMacInstance& gm) {
  check_dimensions(gm);
  const Eigen::Index k = gm.G.cols();
  if (!(gm.Sigma - Matrix::Identity(k, k)).isZero(1e-12)) {
    throw Error(Errc::invalid_argument, "input must be whitened (Sigma = I)");
  }
}

}  // namespace

GenieMacInstance to_T_identity(const GenieMacInstance& gm, double eps, double noise) {
  check_eps(eps);
  check_whitened(gm);
  const Eigen::Index k = gm.G.cols();
  GenieMacInstance out;
  out.G = gm.T.transpose() * gm.G;
  out.Sigma = eps * noise * Matrix::Identity(k, k) + (1.0 - eps) * gm.T.transpose() * gm.T;
  out.T = Matrix::Identity(k, k);
  return out;
}

GenieMacInstance to_G_identity(const GenieMacInstance& gm, double eps) {
  check_eps(eps);
  check_whitened(gm);
  const Eigen::Index k = gm.G.cols();
  GenieMacInstance out;
  out.G = Matrix::Identity(k, k);
  const Matrix reg = eps * Matrix::Identity(k, k) + gm.G.transpose() * gm.G;
  out.Sigma = reg.llt().solve(Matrix::Identity(k, k));
  out.Sigma = 0.5 * (out.Sigma + out.Sigma.transpose());
  out.T = gm.G.transpose() * gm.T;
  return out;
}

Matrix eliminate_G(const Matrix& T, const Matrix& target, const Matrix& slack) {
  Matrix rhs = upper_part(target);
  rhs.triangularView<Eigen::StrictlyLower>() = slack.triangularView<Eigen::StrictlyLower>();
  return T.transpose().partialPivLu().solve(rhs);
}

// ---------------------------------------------------------------------------
// Optimizer

namespace {

// Parameter vector layout: k*k entries of an unnormalized T (column major),
// then the k(k-1)/2 strictly-lower slack entries (row by row).
class FstarProblem {
 public:
  FstarProblem(Matrix target, double cond_limit)
      : upper_(upper_part(target)), k_(target.rows()), cond_limit_(cond_limit) {}

  Eigen::Index dimension() const { return k_ * k_ + k_ * (k_ - 1) / 2; }

  Vector pack(const Matrix& t, const Matrix& slack) const {
    Vector x(dimension());
    x.head(k_ * k_) = t.reshaped();
    Eigen::Index p = k_ * k_;
    for (Eigen::Index i = 1; i < k_; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) x(p++) = slack(i, j);
    }
    return x;
  }

  Matrix combiner(const Vector& x) const {
    Matrix t = x.head(k_ * k_).reshaped(k_, k_);
    for (Eigen::Index j = 0; j < k_; ++j) t.col(j) /= t.col(j).norm();
    return t;
  }

  Matrix slack(const Vector& x) const {
    Matrix l = Matrix::Zero(k_, k_);
    Eigen::Index p = k_ * k_;
    for (Eigen::Index i = 1; i < k_; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) l(i, j) = x(p++);
    }
    return l;
  }

  // Rescales every T column to unit norm; the objective is unchanged.
  void project(Vector& x) const {
    for (Eigen::Index j = 0; j < k_; ++j) {
      auto col = x.segment(j * k_, k_);
      const double n = col.norm();
      if (n > 0.0) col /= n;
    }
  }

  // Returns +inf outside the admissible region (zero column, cond(T) too big).
  double operator()(const Vector& x) const {
    Matrix t = x.head(k_ * k_).reshaped(k_, k_);
    for (Eigen::Index j = 0; j < k_; ++j) {
      const double n = t.col(j).norm();
      if (!(n > 0.0) || !std::isfinite(n)) return kInf;
      t.col(j) /= n;
    }
    const Eigen::PartialPivLU<Matrix> lu(t.transpose());
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > cond_limit_) return kInf;
    Matrix rhs = upper_;
    Eigen::Index p = k_ * k_;
    for (Eigen::Index i = 1; i < k_; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) rhs(i, j) = x(p++);
    }
    const double v = half_log2_det_gram(lu.solve(rhs));
    return std::isfinite(v) ? v : kInf;
  }

 private:
  Matrix upper_;
  Eigen::Index k_;
  double cond_limit_;
};

Vector central_gradient(const FstarProblem& f, const Vector& x, double fx) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g(i) = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g(i) = (fp - fx) / h;
    } else if (std::isfinite(fm)) {
      g(i) = (fx - fm) / h;
    } else {
      g(i) = 0.0;
    }
  }
  return g;
}

struct StartOutcome {
  Vector x;
  double value = kInf;
  bool converged = false;
  int iterations = 0;
};

// Quasi-Newton descent with finite-difference gradients. Every accepted step
// strictly lowers the objective; T columns are renormalized after each step.
StartOutcome descend(const FstarProblem& f, Vector x, const OptimizerConfig& cfg) {
  StartOutcome out;
  f.project(x);
  double fx = f(x);
  Vector g = central_gradient(f, x, fx);
  const Eigen::Index n = x.size();
  Matrix inv_hessian = Matrix::Identity(n, n);
  std::vector<double> history{fx};
  bool converged = false;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (g.norm() <= 1e-14 * std::max(1.0, std::abs(fx))) {
      converged = true;
      break;
    }
    bool accepted = false;
    Vector x_new;
    double f_new = kInf;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector dir = -inv_hessian * g;
      double slope = g.dot(dir);
      if (attempt == 1 || !(slope < 0.0)) {
        inv_hessian.setIdentity();
        dir = -g;
        slope = -g.squaredNorm();
        if (attempt == 0) attempt = 1;
      }
      double step = 1.0;
      if (attempt == 1) step = std::min(1.0, 1.0 / g.norm());
      for (int halvings = 0; halvings < 50; ++halvings, step *= 0.5) {
        Vector trial = x + step * dir;
        const double ft = f(trial);
        if (ft < fx && ft <= fx + 1e-4 * step * slope) {
          x_new = std::move(trial);
          f_new = ft;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      converged = true;
      break;
    }
    f.project(x_new);
    const double f_proj = f(x_new);
    if (f_proj < f_new) f_new = f_proj;
    const Vector g_new = central_gradient(f, x_new, f_new);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Vector hy = inv_hessian * y;
      const double yhy = y.dot(hy);
      inv_hessian += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) - (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    x = x_new;
    fx = f_new;
    g = g_new;
    history.push_back(fx);
    const auto w = static_cast<std::size_t>(std::max(1, cfg.stall_window));
    if (history.size() > w) {
      const double before = history[history.size() - 1 - w];
      if (before - fx <= cfg.tol * std::max(std::abs(fx), 1e-300)) {
        converged = true;
        ++it;
        break;
      }
    }
  }
  out.x = std::move(x);
  out.value = fx;
  out.converged = converged;
  out.iterations = it;
  return out;
}

// Start 0: receiver cooperation. Others: orthonormal columns near I with a
// small random slack.
Vector start_point(const FstarProblem& f, const Matrix& target, int start, std::uint64_t seed) {
  const Eigen::Index k = target.rows();
  if (start == 0) return f.pack(Matrix::Identity(k, k), Matrix::Zero(k, k));
  std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(start)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread = 0.25 * start;
  Matrix m(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) m(i, j) = (i == j ? 1.0 : 0.0) + spread * normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
  Matrix slack = Matrix::Zero(k, k);
  for (Eigen::Index i = 1; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) slack(i, j) = 0.1 * scale * normal(rng);
  }
  return f.pack(q, slack);
}

}  // namespace

BoundResult optimize_fstar(const Matrix& target, double power, double noise, const OptimizerConfig& cfg) {
  if (target.rows() != target.cols() || target.rows() < 1) {
    throw Error(Errc::invalid_argument, "H_S must be square");
  }
  if (!(power > 0.0) || !(noise > 0.0)) throw Error(Errc::invalid_argument, "P and N must be positive");
  const Eigen::Index k = target.rows();
  const double snr_scale = std::sqrt(power / noise);
  const Matrix scaled = target * snr_scale;
  const FstarProblem f(scaled, cfg.cond_limit);

  BoundResult result;
  result.subset = OrderedSubset::full(static_cast<std::size_t>(k));
  const int starts = std::max(1, cfg.starts);
  StartOutcome best;
  for (int s = 0; s < starts; ++s) {
    StartOutcome o = descend(f, start_point(f, scaled, s, cfg.seed), cfg);
    result.start_values.push_back(o.value);
    result.iterations += o.iterations;
    if (o.value < best.value) {
      best = std::move(o);
      result.best_start = s;
    }
  }

  const Matrix t = f.combiner(best.x);
  GenieMacInstance unit{eliminate_G(t, scaled, f.slack(best.x)), Matrix::Identity(k, k), t};
  result.instance.G = unit.G / snr_scale;
  result.instance.Sigma = noise * Matrix::Identity(k, k);
  result.instance.T = t;
  result.value_bits = mac_sum_capacity(unit, 1.0);
  result.converged = best.converged;
  result.residuals = check_feasible(result.instance, target, noise, 1e-9);
  return result;
}

BoundResult optimize_subset(const ChannelInstance& ch, const OrderedSubset& subset, const OptimizerConfig& cfg) {
  BoundResult r = optimize_fstar(submatrix(ch, subset), ch.power, ch.noise, cfg);
  r.subset = subset;
  return r;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("GENIE_MAC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SubsetBound> region_outer_bound(const ChannelInstance& ch, std::size_t max_k,
                                            const OptimizerConfig& cfg, bool force) {
  const std::size_t users = ch.users();
  if (max_k < 1 || max_k > users) {
    throw Error(Errc::invalid_argument, "max_k must lie in [1, " + std::to_string(users) + "]");
  }
  if (max_k > kMaxEnumeratedUsers && !force) {
    throw Error(Errc::too_many_orderings, "refusing to enumerate all orderings of " + std::to_string(max_k) +
                                              " users without --force");
  }

  std::vector<SubsetBound> out;
  std::vector<std::pair<std::size_t, OrderedSubset>> tasks;
  // Subsets by size, then lexicographically.
  for (std::size_t size = 1; size <= max_k; ++size) {
    std::vector<bool> pick(users, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      std::vector<std::size_t> members;
      for (std::size_t u = 0; u < users; ++u) {
        if (pick[u]) members.push_back(u);
      }
      const std::size_t slot = out.size();
      out.push_back(SubsetBound{members, {}, {}});
      std::vector<std::size_t> perm = members;
      do {
        tasks.emplace_back(slot, OrderedSubset(perm, users));
      } while (std::next_permutation(perm.begin(), perm.end()));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }

  std::vector<BoundResult> results(tasks.size());
  detail::parallel_for(tasks.size(), worker_threads(),
                       [&](std::size_t i) { results[i] = optimize_subset(ch, tasks[i].second, cfg); });

  std::vector<bool> has_best(out.size(), false);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    SubsetBound& sb = out[tasks[i].first];
    sb.orderings.push_back({tasks[i].second, results[i].value_bits});
    if (!has_best[tasks[i].first] || results[i].value_bits < sb.best.value_bits) {
      sb.best = std::move(results[i]);
      has_best[tasks[i].first] = true;
    }
  }
  return out;
}

}  // namespace geniemac
