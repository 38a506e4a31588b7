#include <doctest.h>

#include <cmath>
#include <random>

#include "geniemac/channel.hpp"
#include "oracles.hpp"

using namespace geniemac;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

template <typename Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected geniemac::Error");
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("validate_channel accepts well-formed input") {
  const auto one = validate_channel(mat({{1}}), 1, 1);
  CHECK(one.users() == 1);
  const auto two = validate_channel(mat({{1, 0.5}, {0.5, 1}}), 2, 1);
  CHECK(two.users() == 2);
  CHECK(two.power == 2.0);
}

TEST_CASE("validate_channel rejects bad fields") {
  try {
    validate_channel(mat({{1, 2}, {3, 4}}), -1, 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()) == "P must be positive");
  }
  CHECK(error_code([] { validate_channel(mat({{1, 2}}), 1, 1); }) == Errc::invalid_argument);
  CHECK(error_code([] { validate_channel(mat({{1}}), 1, 0); }) == Errc::invalid_argument);
  CHECK(error_code([] { validate_channel(mat({{NAN}}), 1, 1); }) == Errc::invalid_argument);
  CHECK(error_code([] { validate_channel(mat({{INFINITY}}), 1, 1); }) == Errc::invalid_argument);
}

TEST_CASE("normalize scales gains by sqrt(P/N)") {
  const auto a = normalize(validate_channel(mat({{2}}), 1, 4));
  CHECK(a.gains(0, 0) == doctest::Approx(1.0));
  CHECK(a.power == 1.0);
  CHECK(a.noise == 1.0);

  const auto same = normalize(validate_channel(mat({{1}}), 1, 1));
  CHECK(same.gains(0, 0) == 1.0);

  const auto b = normalize(validate_channel(mat({{1, 1}, {2, 2}}), 4, 1));
  CHECK(b.gains.isApprox(mat({{2, 2}, {4, 4}}), 1e-15));
}

TEST_CASE("normalize is idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> snr(0.1, 10.0);
    const auto ch = validate_channel(oracle::gaussian(rng, 3, 3), snr(rng), snr(rng));
    const auto once = normalize(ch);
    const auto twice = normalize(once);
    CHECK(twice.gains == once.gains);
  }
}

TEST_CASE("factor_degraded on exact rank one") {
  const auto dc = factor_degraded(validate_channel(mat({{1, 1}, {2, 2}}), 1, 1));
  CHECK(dc.a(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.a(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dc.b(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.b(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("factor_degraded reorders receivers to ascending a^2") {
  const auto dc = factor_degraded(validate_channel(mat({{2, 2}, {1, 1}}), 1, 1));
  CHECK(dc.a(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.a(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dc.b(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.b(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc.order == std::vector<std::size_t>{1, 0});
}

TEST_CASE("factor_degraded rejects full rank") {
  try {
    factor_degraded(validate_channel(mat({{1, 0}, {0, 1}}), 1, 1));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_degraded);
    CHECK(std::string(e.what()).find("channel is not degraded") != std::string::npos);
    CHECK(std::string(e.what()).find("= 1") != std::string::npos);
  }
}

TEST_CASE("factor_degraded handles zero channel and negative receivers") {
  const auto zero = factor_degraded(validate_channel(Matrix::Zero(3, 3), 1, 1));
  CHECK(zero.a.isZero());

  // Receiver 2 has a negative gain row; it becomes a sign flip.
  const Matrix h = vec({1, -2, 3}) * vec({0.5, -1, 2}).transpose();
  const auto dc = factor_degraded(validate_channel(h, 1, 1));
  CHECK((dc.a.array() >= 0).all());
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(h(static_cast<Eigen::Index>(dc.order[p]), static_cast<Eigen::Index>(dc.order[q])) ==
            doctest::Approx(dc.receiver_flip[p] * dc.a(p) * dc.b(q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("factor_degraded reconstructs random rank-one channels") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(-4.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index k = 1 + trial % 6;
    Vector a(k), b(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    const Matrix h = a * b.transpose();
    const auto dc = factor_degraded(validate_channel(h, 1, 1));
    for (Eigen::Index p = 1; p < k; ++p) CHECK(dc.a(p) * dc.a(p) >= dc.a(p - 1) * dc.a(p - 1));
    Matrix rebuilt(k, k);
    for (Eigen::Index p = 0; p < k; ++p) {
      for (Eigen::Index q = 0; q < k; ++q) {
        rebuilt(static_cast<Eigen::Index>(dc.order[static_cast<std::size_t>(p)]),
                static_cast<Eigen::Index>(dc.order[static_cast<std::size_t>(q)])) =
            dc.receiver_flip[static_cast<std::size_t>(p)] * dc.a(p) * dc.b(q);
      }
    }
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() <= 1e-10);
    // Same (a, b) up to a positive scale on |a| and its inverse on b.
    const double lambda = dc.a.norm() / a.norm();
    for (Eigen::Index p = 0; p < k; ++p) {
      const auto orig = static_cast<Eigen::Index>(dc.order[static_cast<std::size_t>(p)]);
      CHECK(dc.a(p) == doctest::Approx(lambda * std::abs(a(orig))).epsilon(1e-9));
      CHECK(std::abs(dc.b(p)) == doctest::Approx(std::abs(b(orig)) / lambda).epsilon(1e-9));
    }
  }
}

TEST_CASE("make_degraded canonicalizes explicit factors") {
  const auto dc = make_degraded(vec({3, -1, 2}), vec({1, 2, 3}), 2, 1);
  CHECK(dc.a == vec({1, 2, 3}));
  CHECK(dc.b == vec({2, 3, 1}));
  CHECK(dc.order == std::vector<std::size_t>{1, 2, 0});
  CHECK(dc.receiver_flip == std::vector<int>{-1, 1, 1});
  CHECK(error_code([] { make_degraded(vec({1}), vec({1, 2}), 1, 1); }) == Errc::invalid_argument);
}

TEST_CASE("normalize on degraded channels moves sqrt(P/N) into b") {
  const auto dc = normalize(make_degraded(vec({1, 2}), vec({1, 1}), 4, 1));
  CHECK(dc.a == vec({1, 2}));
  CHECK(dc.b.isApprox(vec({2, 2})));
  CHECK(dc.power == 1.0);
}

TEST_CASE("submatrix selects and permutes") {
  const auto ch = validate_channel(mat({{1, 2}, {3, 4}}), 1, 1);
  CHECK(submatrix(ch, OrderedSubset({1, 0}, 2)) == mat({{4, 3}, {2, 1}}));
  CHECK(submatrix(ch, OrderedSubset({0}, 2)) == mat({{1}}));
  const auto eye = validate_channel(Matrix::Identity(3, 3), 1, 1);
  CHECK(submatrix(eye, OrderedSubset({0, 2}, 3)) == mat({{1, 0}, {0, 1}}));
  CHECK(submatrix(ch, OrderedSubset::full(2)) == ch.gains);
}

TEST_CASE("OrderedSubset validation") {
  CHECK(error_code([] { OrderedSubset({6}, 2); }) == Errc::out_of_range);
  CHECK(error_code([] { OrderedSubset({0, 0}, 2); }) == Errc::invalid_argument);
  CHECK(error_code([] { OrderedSubset({}, 2); }) == Errc::invalid_argument);
  const OrderedSubset s({2, 0}, 4);
  CHECK(s.to_string() == "3,1");
  CHECK(s.complement(4) == std::vector<std::size_t>{1, 3});
}
