#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpfluct/cumulants.hpp"
#include "mpfluct/errors.hpp"
#include "mpfluct/rational.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace mpfluct;
using namespace mpfluct::cumulants;

namespace {

// Table of E(prod_{i in S} X_i) for X_i = Z_{idx[i]}, Z Gaussian with covariance cov.
MomentTable<Rational> gaussian_table(const std::vector<std::vector<Rational>>& cov, const std::vector<int>& idx) {
  const int j = static_cast<int>(idx.size());
  MomentTable<Rational> t(j);
  for (std::uint32_t s = 1; s < (1U << j); ++s) {
    std::vector<int> members;
    for (int i = 0; i < j; ++i)
      if (s & (1U << i)) members.push_back(idx[static_cast<std::size_t>(i)]);
    t[s] = oracle::gaussian_moment(cov, members);
  }
  return t;
}

// Moments of a single variable repeated j times: E(X^{|S|}).
MomentTable<Rational> power_table(const std::vector<Rational>& raw_moments, int j) {
  MomentTable<Rational> t(j);
  for (std::uint32_t s = 1; s < (1U << j); ++s) t[s] = raw_moments[static_cast<std::size_t>(std::popcount(s)) - 1];
  return t;
}

}  // namespace

TEST_CASE("moment-cumulant transform: low orders") {
  MomentTable<Rational> one(1);
  one[1] = Rational(7, 3);
  CHECK(cumulant_from_moments(one) == Rational(7, 3));

  MomentTable<Rational> two(2);
  two[1] = 2;
  two[2] = 5;
  two[3] = 13;
  CHECK(cumulant_from_moments(two) == 3);

  CHECK(cumulant_from_moments(power_table({1, 2, 6}, 3)) == 2);
  CHECK_THROWS_AS(MomentTable<double>(0), DomainError);
  CHECK_THROWS_AS(MomentTable<double>(9), DomainError);
}

TEST_CASE("moment-cumulant transform: Poisson and exponential cumulants") {
  // Poisson(1): raw moments are Bell numbers and every cumulant equals 1.
  const auto bell = oracle::bell_numbers(8);
  std::vector<Rational> poisson;
  for (int r = 1; r <= 8; ++r) poisson.emplace_back(static_cast<unsigned long>(bell[static_cast<std::size_t>(r)]));
  for (int j = 1; j <= 8; ++j) CHECK(cumulant_from_moments(power_table(poisson, j)) == 1);

  // Exp(1): raw moments r!, cumulants (j - 1)!.
  std::vector<Rational> expo;
  Rational f = 1;
  for (int r = 1; r <= 8; ++r) {
    f *= r;
    expo.push_back(f);
  }
  Rational fact = 1;
  for (int j = 1; j <= 8; ++j) {
    CHECK(cumulant_from_moments(power_table(expo, j)) == fact);
    fact *= j;
  }
}

TEST_CASE("moment-cumulant transform: multilinearity in one slot") {
  // X_1 = a U + b V with (U, V, X_2, X_3) jointly described by explicit moment tables.
  std::mt19937 gen(5);
  std::uniform_int_distribution<int> draw(-5, 5);
  for (int j : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      MomentTable<Rational> u(j), v(j);
      for (std::uint32_t s = 1; s < (1U << j); ++s) {
        if (s & 1U) {
          u[s] = draw(gen);
          v[s] = draw(gen);
        } else {
          u[s] = draw(gen);
          v[s] = u[s];
        }
      }
      const Rational a = oracle::ratio(draw(gen), 3);
      const Rational b = oracle::ratio(draw(gen), 7);
      MomentTable<Rational> mix(j);
      for (std::uint32_t s = 1; s < (1U << j); ++s) mix[s] = (s & 1U) ? a * u[s] + b * v[s] : u[s];
      CHECK(cumulant_from_moments(mix) == a * cumulant_from_moments(u) + b * cumulant_from_moments(v));
    }
  }
}

TEST_CASE("moment-cumulant transform: vanishes for independent families") {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> draw(-4, 4);
  for (int j = 2; j <= 6; ++j) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::uint32_t full = (1U << j) - 1;
      const std::uint32_t m_set = static_cast<std::uint32_t>(1 + gen() % ((1U << j) - 2));
      std::vector<Rational> mm(1U << j), nn(1U << j);
      mm[0] = nn[0] = 1;
      for (std::uint32_t s = 1; s <= full; ++s) {
        mm[s] = oracle::ratio(draw(gen), static_cast<long>(1 + gen() % 3));
        nn[s] = oracle::ratio(draw(gen), static_cast<long>(1 + gen() % 3));
      }
      MomentTable<Rational> t(j);
      for (std::uint32_t s = 1; s <= full; ++s) t[s] = mm[s & m_set] * nn[s & ~m_set & full];
      CHECK(cumulant_from_moments(t) == 0);
    }
  }
}

TEST_CASE("moment-cumulant transform: Gaussian tables vanish beyond order two") {
  const std::vector<std::vector<Rational>> cov{{2, 1, Rational(1, 2)}, {1, 3, -1}, {Rational(1, 2), -1, 1}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(cumulant_from_moments(gaussian_table(cov, {a, b})) == cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
  for (const auto& idx : std::vector<std::vector<int>>{{0, 0, 0}, {0, 1, 2}, {2, 1, 1}, {0, 0, 1, 1}, {0, 1, 2, 2},
                                                       {1, 1, 1, 1}, {0, 1, 2, 0, 1}, {0, 0, 1, 1, 2, 2}}) {
    CHECK(cumulant_from_moments(gaussian_table(cov, idx)) == 0);
  }
}

TEST_CASE("moment-cumulant transform: symmetric under slot permutations") {
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> draw(-6, 6);
  for (int j = 2; j <= 4; ++j) {
    MomentTable<Rational> t(j);
    for (std::uint32_t s = 1; s < (1U << j); ++s) t[s] = draw(gen);
    const Rational base = cumulant_from_moments(t);
    std::vector<int> perm(static_cast<std::size_t>(j));
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) {
      MomentTable<Rational> p(j);
      for (std::uint32_t s = 1; s < (1U << j); ++s) {
        std::uint32_t image = 0;
        for (int i = 0; i < j; ++i)
          if (s & (1U << i)) image |= 1U << perm[static_cast<std::size_t>(i)];
        p[image] = t[s];
      }
      CHECK(cumulant_from_moments(p) == base);
    }
  }
}

TEST_CASE("estimator: degenerate and duplicated columns") {
  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(50, 2, 3.5);
  const std::vector<int> pair{0, 1};
  const auto c = estimate_joint_cumulant(constant, pair);
  CHECK(std::abs(c.value) < 1e-12);
  CHECK(c.order == 2);
  CHECK(c.replicate_count == 50);

  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(400, 2);
  for (int r = 0; r < 400; ++r) {
    x(r, 0) = normal(gen);
    x(r, 1) = x(r, 0);
  }
  const std::vector<int> same{0, 0};
  const auto across = estimate_joint_cumulant(x, pair);
  const auto within = estimate_joint_cumulant(x, same);
  CHECK(across.value == doctest::Approx(within.value).epsilon(1e-12));
  CHECK(across.std_error > 0);

  Eigen::MatrixXd one_row(1, 2);
  one_row << 1, 2;
  CHECK_THROWS_AS(estimate_joint_cumulant(one_row, pair), InsufficientDataError);
  const std::vector<int> seven(7, 0);
  CHECK_THROWS_AS(estimate_joint_cumulant(x, seven), DomainError);
}

TEST_CASE("estimator: Gaussian third and fourth cumulants are small, exponential third is not") {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> expo;
  const int r = 100000;
  Eigen::MatrixXd x(r, 2);
  for (int i = 0; i < r; ++i) {
    x(i, 0) = normal(gen);
    x(i, 1) = expo(gen);
  }
  const std::vector<int> g3{0, 0, 0};
  const std::vector<int> g4{0, 0, 0, 0};
  const auto c3 = estimate_joint_cumulant(x, g3);
  const auto c4 = estimate_joint_cumulant(x, g4);
  CHECK(std::abs(c3.value) < 4 * c3.std_error);
  CHECK(std::abs(c4.value) < 4 * c4.std_error);
  CHECK(c3.replicate_count == r);

  const std::vector<int> e3{1, 1, 1};
  const auto ce = estimate_joint_cumulant(x, e3);
  CHECK(std::abs(ce.value - 2.0) < 4 * ce.std_error);
  CHECK(ce.value > 1.5);

  const std::vector<int> mixed{0, 1, 1};
  const auto cm = estimate_joint_cumulant(x, mixed);
  CHECK(std::abs(cm.value) < 4 * cm.std_error);
}

TEST_CASE("standardization") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto z = standardize_columns(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0).scale(1e-15));
  const double var = z.col(0).squaredNorm() / 3.0;
  CHECK(var == doctest::Approx(1.0));
  CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);
}
