#include "homvol/polynomial.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace homvol;

namespace {
std::uint64_t binom(int a, int b) {
  std::uint64_t r = 1;
  for (int k = 1; k <= b; ++k)
    r = r * static_cast<std::uint64_t>(a - b + k) / static_cast<std::uint64_t>(k);
  return r;
}
Polynomial quartic(double a, double b, double c) {
  return Polynomial(2, Rational::make(4), 1, {{{4, 0}, a}, {{2, 2}, b}, {{0, 4}, c}});
}
} // namespace

TEST_CASE("enumerate_indices examples") {
  const auto e = enumerate_indices(2, 4, 1);
  REQUIRE(e.size() == 5);
  CHECK(e[0] == MultiIndex{4, 0});
  CHECK(e[1] == MultiIndex{3, 1});
  CHECK(e[2] == MultiIndex{2, 2});
  CHECK(e[3] == MultiIndex{1, 3});
  CHECK(e[4] == MultiIndex{0, 4});
  CHECK(enumerate_indices(1, 2, 1) == std::vector<MultiIndex>{{2}});
  CHECK(enumerate_indices(2, 2, 4) == std::vector<MultiIndex>{{2, 0}, {1, 1}, {0, 2}});
}

TEST_CASE("enumerate_indices count is stars and bars") {
  for (int n = 1; n <= 4; ++n)
    for (int dq = 0; dq <= 8; ++dq)
      CHECK(enumerate_indices(n, dq, 1).size() == binom(n - 1 + dq, dq));
}

TEST_CASE("multinomial coefficients") {
  CHECK(multinomial_coefficient({2, 2}) == 6);
  CHECK(multinomial_coefficient({4, 0}) == 1);
  CHECK(multinomial_coefficient({1, 1, 2}) == 12);
  CHECK_THROWS_AS(multinomial_coefficient({1, 1}, 2), std::invalid_argument);
}

TEST_CASE("evaluate examples") {
  const Polynomial l4 = ld_polynomial(2, Rational::make(4));
  const double one[2] = {1, 1};
  CHECK(evaluate(l4, one) == 2.0);
  const Polynomial sq = ld_polynomial(2, Rational::make(1, 2), 2);
  const double p[2] = {4, 9};
  CHECK(evaluate(sq, p) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(evaluate(quartic(1, -1.925, 1), one) == doctest::Approx(0.075).epsilon(1e-12));
}

TEST_CASE("zero to the zero is one") {
  const Polynomial g(2, Rational::make(2), 1, {{{2, 0}, 1.0}});
  const double origin_axis[2] = {0.0, 0.0};
  CHECK(evaluate(g, origin_axis) == 0.0);
  const double x[2] = {3.0, 0.0};
  CHECK(evaluate(g, x) == 9.0);
}

TEST_CASE("rescale") {
  const Polynomial disk = ld_polynomial(2, Rational::make(2));
  CHECK(rescale(disk, 1.0) == disk);
  const Polynomial four = rescale(disk, 4.0);
  CHECK(four.coeff({2, 0}) == 4.0);
  CHECK(norms(rescale(ld_polynomial(2, Rational::make(4)), 2.0)).l1 == 4.0);
  CHECK_THROWS_AS(rescale(disk, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rescale(disk, -1.0), std::invalid_argument);
}

TEST_CASE("rescale is linear in evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  const Polynomial g(2, Rational::make(4), 1, {{{4, 0}, 1.0}, {{3, 1}, 0.3}, {{0, 4}, 2.0}});
  for (int k = 0; k < 50; ++k) {
    const double x[2] = {u(rng), u(rng)};
    for (double lam : {0.5, 2.0, 7.0})
      CHECK(evaluate(rescale(g, lam), x) == doctest::Approx(lam * evaluate(g, x)).epsilon(1e-14));
  }
}

TEST_CASE("norm examples") {
  for (int n = 1; n <= 4; ++n) {
    const auto r = norms(ld_polynomial(n, Rational::make(6)));
    CHECK(r.l0 == static_cast<std::size_t>(n));
    CHECK(r.l1 == n);
  }
  const Polynomial p(2, Rational::make(4), 1, {{{4, 0}, 1.0}, {{2, 2}, 1.0 / 3.0}, {{0, 4}, 1.0}},
                     Convention::multinomial);
  CHECK(*norms(p).l2_weighted_sq == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  const Polynomial zero(2, Rational::make(4), 1, {});
  const auto z = norms(zero);
  CHECK(z.l0 == 0);
  CHECK(z.l1 == 0.0);
  CHECK(*z.l2_weighted_sq == 0.0);
  CHECK_THROWS_AS(weighted_l2_sq(ld_polynomial(2, Rational::make(1, 2), 2)), std::invalid_argument);
  CHECK_FALSE(norms(ld_polynomial(2, Rational::make(1, 2), 2)).l2_weighted_sq.has_value());
}

TEST_CASE("convention conversion is an exact involution") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> c(5);
  for (double &v : c)
    v = u(rng);
  const Polynomial g = Polynomial::from_dense(2, Rational::make(4), 1, c);
  const Polynomial m = to_convention(g, Convention::multinomial);
  CHECK(m.coeff({2, 2}) == g.coeff({2, 2}) / 6.0);
  CHECK(m.coeff({3, 1}) == g.coeff({3, 1}) / 4.0);
  const Polynomial back = to_convention(m, Convention::monomial);
  for (const auto &a : g.basis())
    CHECK(back.coeff(a) == doctest::Approx(g.coeff(a)).epsilon(1e-15));
  const double x[2] = {0.3, -1.2};
  CHECK(evaluate(m, x) == doctest::Approx(evaluate(g, x)).epsilon(1e-14));
}

TEST_CASE("reflection and absolute-value invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  const Polynomial even = quartic(1.0, -0.7, 2.0);
  const Polynomial gen(2, Rational::make(1, 2), 8, {{{4, 0}, 1.0}, {{1, 3}, 0.4}, {{0, 4}, 1.0}});
  CHECK(even.reflection_symmetric());
  for (int k = 0; k < 50; ++k) {
    const double x[2] = {u(rng), u(rng)};
    const double ax[2] = {std::abs(x[0]), std::abs(x[1])};
    const double fx[2] = {-x[0], x[1]};
    CHECK(evaluate(even, x) == doctest::Approx(evaluate(even, fx)).epsilon(1e-15));
    CHECK(evaluate(gen, x) == evaluate(gen, ax));
  }
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS_WITH_AS(Polynomial(2, Rational::make(4), 1, {{{3, 0}, 1.0}}), doctest::Contains("degree mismatch"),
                       std::invalid_argument);
  CHECK_THROWS_AS(Polynomial(2, Rational::make(4), 1, {{{4, 0}, 1.0}, {{4, 0}, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Polynomial(2, Rational::make(4), 1, {{{4}, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Polynomial(2, Rational::make(1, 2), 2, {{{1, 0}, 1.0}}, Convention::multinomial),
                  std::invalid_argument);
}

TEST_CASE("expand_gram examples") {
  const Polynomial disk = expand_gram(GramForm(2, 2, Matrix::identity(2)));
  CHECK(disk.coeff({2, 0}) == 1.0);
  CHECK(disk.coeff({1, 1}) == 0.0);
  CHECK(disk.coeff({0, 2}) == 1.0);
  const Polynomial g = expand_gram(GramForm(2, 4, Matrix::identity(3)));
  CHECK(g.coeff({4, 0}) == 1.0);
  CHECK(g.coeff({2, 2}) == 1.0);
  CHECK(g.coeff({0, 4}) == 1.0);
  CHECK(g.coeff({3, 1}) == 0.0);
  Matrix q(3, 3);
  q(0, 0) = q(2, 2) = q(0, 2) = q(2, 0) = 1.0;
  const Polynomial sq = expand_gram(GramForm(2, 4, q));
  CHECK(sq.coeff({4, 0}) == 1.0);
  CHECK(sq.coeff({2, 2}) == 2.0);
  CHECK(sq.coeff({0, 4}) == 1.0);
}

TEST_CASE("expand_gram is linear") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a(6, 6), b(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i; j < 6; ++j) {
        a(i, j) = a(j, i) = nd(rng);
        b(i, j) = b(j, i) = nd(rng);
      }
    const Polynomial lhs = expand_gram(GramForm(3, 4, a + b));
    const Polynomial rhs = combine(1.0, expand_gram(GramForm(3, 4, a)), 1.0, expand_gram(GramForm(3, 4, b)));
    for (const auto &al : lhs.basis())
      CHECK(lhs.coeff(al) == doctest::Approx(rhs.coeff(al)).epsilon(1e-13));
  }
}

TEST_CASE("Gram form validation and the L_d Gram") {
  Matrix q = Matrix::identity(3);
  q(0, 1) = 0.5;
  CHECK_THROWS_AS(GramForm(2, 4, q), std::invalid_argument);
  CHECK_THROWS_AS(GramForm(2, 3, Matrix::identity(2)), std::invalid_argument);
  const GramForm ld = ld_gram(2, 4);
  CHECK(ld.Q().trace() == 2.0);
  CHECK(ld.Q()(1, 1) == 0.0);
  const Polynomial g = expand_gram(ld);
  for (const auto &a : g.basis())
    CHECK(g.coeff(a) == ld_polynomial(2, Rational::make(4)).coeff(a));
  CHECK(*norms(ld).trace == 2.0);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("1/2") == Rational::make(1, 2));
  CHECK(Rational::parse(" 4 ") == Rational::make(4));
  CHECK(Rational::parse("6/4") == Rational::make(3, 2));
  CHECK_THROWS(Rational::parse("abc"));
  CHECK_THROWS(Rational::parse("1/0"));
}
