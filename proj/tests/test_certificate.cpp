#include <doctest.h>

#include <cmath>
#include <random>

#include "geniemac/certificate.hpp"
#include "geniemac/genie_mac.hpp"
#include "geniemac/sic.hpp"
#include "oracles.hpp"

using namespace geniemac;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const double kSqrt3 = std::sqrt(3.0);

}  // namespace

TEST_CASE("build_c") {
  CHECK(build_c(vec({1, 2})).isApprox(vec({1, kSqrt3})));
  CHECK(build_c(vec({3, 3, 3})) == vec({3, 0, 0}));
  CHECK(build_c(vec({0, 1})) == vec({0, 1}));
  CHECK_THROWS_AS(build_c(vec({2, 1})), Error);
}

TEST_CASE("build_T") {
  const Matrix t = build_T(vec({1, 2}), build_c(vec({1, 2})));
  CHECK(t(0, 0) == doctest::Approx(1.0));
  CHECK(t(1, 0) == 0.0);
  CHECK(t(0, 1) == doctest::Approx(0.5));
  CHECK(t(1, 1) == doctest::Approx(kSqrt3 / 2));
  CHECK(t.col(1).norm() == doctest::Approx(1.0));
  CHECK(t.col(1).dot(build_c(vec({1, 2}))) == doctest::Approx(2.0));

  CHECK(build_T(vec({1}), vec({1})) == Matrix::Identity(1, 1));

  const Matrix tie = build_T(vec({2, 2}), build_c(vec({2, 2})));
  CHECK(tie.col(1) == tie.col(0));
  CHECK(tie.col(0) == vec({1, 0}));

  // a_1 = 0 falls back to e_1.
  const Matrix zero = build_T(vec({0, 0, 1}), build_c(vec({0, 0, 1})));
  CHECK(zero == Matrix::Identity(3, 3));
}

TEST_CASE("solve_D") {
  const Matrix d = solve_D(vec({1, 1}), build_c(vec({1, 2})));
  CHECK(d(0, 0) == 1.0);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 1) == 1.0);
  CHECK(d(1, 0) == doctest::Approx(0.5));
  CHECK(solve_D(vec({1}), vec({1})) == Matrix::Ones(1, 1));

  // b vanishes from index 2 on: those sub-diagonal rows are zero.
  const Matrix tail = solve_D(vec({1, 2, 0, 0}), build_c(vec({1, 2, 3, 4})));
  CHECK(tail(2, 0) == 0.0);
  CHECK(tail(2, 1) == 0.0);
  CHECK(tail(3, 0) == 0.0);
  CHECK(tail(3, 2) == 0.0);
}

TEST_CASE("build_G") {
  CHECK(build_G(vec({1}), vec({1}), Matrix::Ones(1, 1)) == Matrix::Ones(1, 1));
  const Vector c = build_c(vec({1, 2}));
  const Matrix g = build_G(vec({1, 1}), c, solve_D(vec({1, 1}), c));
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(1.0));
  CHECK(g(1, 0) == doctest::Approx(kSqrt3 / 2));
  CHECK(g(1, 1) == doctest::Approx(kSqrt3));
  const Matrix tg = build_T(vec({1, 2}), c).transpose() * g;
  CHECK(tg(0, 0) == doctest::Approx(1.0));
  CHECK(tg(0, 1) == doctest::Approx(1.0));
  CHECK(tg(1, 1) == doctest::Approx(2.0));
  CHECK(build_G(vec({0, 0}), c, Matrix::Ones(2, 2)).isZero());
}

TEST_CASE("build_V") {
  CHECK(build_V(vec({1}), vec({1})) == Matrix::Identity(1, 1));
  const Matrix v = build_V(vec({1, 1}), build_c(vec({1, 2})));
  CHECK(v(1, 0) == doctest::Approx(-kSqrt3 / 2));
  CHECK(v(0, 1) == 0.0);
  CHECK(v(1, 1) == 1.0);
  const Matrix z = build_V(vec({1, 1, 1}), build_c(vec({1, 1, 2})));
  CHECK(z(1, 0) == 0.0);
}

TEST_CASE("verify_certificate passes on built certificates") {
  const auto dc = make_degraded(vec({1, 2}), vec({1, 1}), 1, 1);
  const auto report = verify_certificate(build_certificate(dc), dc);
  CHECK(report.passed);
  CHECK(report.max_residual < 1e-12);
  CHECK(report.checks.size() == 8);

  const auto single = make_degraded(vec({1}), vec({1}), 1, 1);
  CHECK(verify_certificate(build_certificate(single), single).passed);
}

TEST_CASE("verify_certificate reports an injected fault") {
  const auto dc = make_degraded(vec({1, 2}), vec({1, 1}), 1, 1);
  Certificate cert = build_certificate(dc);
  cert.T(0, 1) += 1e-3;
  const auto report = verify_certificate(cert, dc);
  CHECK_FALSE(report.passed);
  const auto* norm = report.find("unit_norm");
  REQUIRE(norm != nullptr);
  CHECK_FALSE(norm->passed);
  CHECK(norm->residual > 1e-4);
  CHECK(norm->residual < 1e-2);
}

TEST_CASE("degraded_sum_capacity examples") {
  CHECK(degraded_sum_capacity(make_degraded(vec({1}), vec({1}), 1, 1)) == doctest::Approx(0.5).epsilon(1e-15));
  const auto tie = make_degraded(vec({1, 1}), vec({1, 1}), 1, 1);
  CHECK(degraded_sum_capacity(tie) == doctest::Approx(0.79248125036057809).epsilon(1e-14));
  CHECK(std::abs(build_certificate(tie).logdet_bits - degraded_sum_capacity(tie)) <= 1e-9);
  const auto base = make_degraded(vec({1, 2, 3}), vec({2, 0.5, 1}), 1.5, 0.7);
  auto scaled = base;
  scaled.power *= 4;
  scaled.noise *= 4;
  CHECK(degraded_sum_capacity(scaled) == doctest::Approx(degraded_sum_capacity(base)).epsilon(1e-15));
}

TEST_CASE("dof") {
  CHECK(dof(make_degraded(vec({1, 2}), vec({1, 1}), 1, 1)) == 1);
  CHECK(dof(make_degraded(vec({0, 0}), vec({1, 1}), 1, 1)) == 0);
  CHECK(dof(make_degraded(vec({1}), vec({1}), 1, 1)) == 1);
}

TEST_CASE("two-user specialization matches the classical formula") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> g(0.0, 4.0);
  std::uniform_real_distribution<double> snr(0.1, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    double a1 = g(rng), a2 = g(rng);
    if (a1 > a2) std::swap(a1, a2);
    const double b1 = g(rng), b2 = g(rng), p = snr(rng), n = snr(rng);
    const double closed = degraded_sum_capacity(make_degraded(vec({a1, a2}), vec({b1, b2}), p, n));
    CHECK(closed == doctest::Approx(oracle::two_user_degraded(a1, a2, b1, b2, p, n)).epsilon(1e-12));
  }
}

TEST_CASE("certificate properties on the random ensemble") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracle::degraded_sample(rng, 8, false);
    const auto dc = make_degraded(s.a, s.b, 1, 1);
    const Certificate cert = build_certificate(dc);
    const auto report = verify_certificate(cert, dc, 1e-9);
    REQUIRE(report.passed);
    const double closed = degraded_sum_capacity(dc);
    REQUIRE(std::abs(closed - sic_sum_rate(dc).sum) <= 1e-10);
    const Eigen::Index k = s.a.size();
    const double by_hand = 0.5 * oracle::log2_det(Matrix::Identity(k, k) + cert.G * cert.G.transpose());
    REQUIRE(std::abs(by_hand - cert.bound_bits) <= 1e-9);
    REQUIRE(std::abs(cert.bound_bits - closed) <= 1e-9);
    REQUIRE(std::abs(oracle::log2_det(cert.V)) <= 1e-12);
  }
}

TEST_CASE("random feasible genie-MAC points dominate the closed form") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::degraded_sample(rng, 6, false);
    const auto dc = make_degraded(s.a, s.b, 1, 1);
    const Matrix h = dc.canonical_gains();
    const Eigen::Index k = h.rows();
    const Matrix t = oracle::unit_columns(rng, k);
    const Matrix g = eliminate_G(t, h, oracle::strictly_lower(rng, k));
    const GenieMacInstance gm{g, Matrix::Identity(k, k), t};
    REQUIRE(check_feasible(gm, h, 1.0, 1e-9).feasible());
    REQUIRE(mac_sum_capacity(gm, 1.0) >= degraded_sum_capacity(dc) - 1e-9);
  }
}
