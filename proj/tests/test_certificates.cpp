#include "homvol/certificates.hpp"
#include "homvol/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace homvol;
using std::numbers::pi;

namespace {
Polynomial at_rho(const Polynomial &g) {
  return scale_to_target_volume(g, closed_form_ball_volume(g.n(), g.degree()));
}
Polynomial p2_optimum() {
  return Polynomial(2, Rational::make(4), 1, {{{4, 0}, 1.0}, {{2, 2}, 1.0 / 3.0}, {{0, 4}, 1.0}},
                    Convention::multinomial);
}
} // namespace

TEST_CASE("p1 passes on L_d with exact unit duals on the support") {
  for (auto [n, d] : {std::pair{2, 2}, std::pair{2, 4}, std::pair{3, 2}}) {
    const Polynomial g = ld_polynomial(n, Rational::make(d));
    const Certificate c = certify_p1(g, basis_moments(g), 1e-6);
    CAPTURE(n);
    CAPTURE(d);
    CHECK(c.pass);
    CHECK(c.kind == CertificateKind::p1_kkt);
  }
  const Polynomial l4 = ld_polynomial(2, Rational::make(4));
  const Certificate c = certify_p1(l4, basis_moments(l4), 1e-6);
  CHECK(std::abs(c.duals.at("u(4,0)") - 1.0) <= 1e-12);
  CHECK(std::abs(c.duals.at("u(0,4)") - 1.0) <= 1e-12);
  CHECK(std::abs(c.duals.at("psi(4,0)")) <= 1e-12);
}

TEST_CASE("p1 fails on a perturbed feasible point") {
  const Polynomial g = at_rho(Polynomial(2, Rational::make(4), 1,
                                         {{{4, 0}, 1.0}, {{2, 2}, 0.3 * 6.0}, {{0, 4}, 1.0}}));
  const Certificate c = certify_p1(g, basis_moments(g), 1e-6);
  CHECK_FALSE(c.pass);
  CHECK(c.max_residual() > 1e-3);
}

TEST_CASE("p1 on the generalized half ball") {
  const Polynomial g = ld_polynomial(2, Rational::make(1, 2), 4);
  const Certificate c = certify_p1(g, basis_moments(g), 1e-6);
  CHECK(c.pass);
}

TEST_CASE("p1 needs every basis moment") {
  const Polynomial g = ld_polynomial(2, Rational::make(4));
  const std::vector<MultiIndex> some{{4, 0}};
  CHECK_THROWS_AS(certify_p1(g, moment_table(g, some), 1e-6), std::out_of_range);
}

TEST_CASE("p2 passes at the squared disk") {
  const Polynomial p = p2_optimum();
  const MomentTable t = basis_moments(p);
  CHECK(t.normalization.value == doctest::Approx(pi).epsilon(1e-12));
  const Certificate c = certify_p2(p, t, 1e-6);
  CHECK(c.pass);
  CHECK(c.duals.at("l2_star") == doctest::Approx(8.0 / 3.0));
  CHECK(c.residual("alpha(2,2)") <= 1e-6);
  CHECK(c.residual("alpha(4,0)") <= 1e-6);
}

TEST_CASE("p2 rejects the L4 polynomial and the wrong convention") {
  const Polynomial l4 = at_rho(ld_polynomial(2, Rational::make(4)));
  const Polynomial m = to_convention(l4, Convention::multinomial);
  const Certificate c = certify_p2(m, basis_moments(m), 1e-6);
  CHECK_FALSE(c.pass);
  CHECK(c.residual("alpha(2,2)") >= 0.1);
  CHECK_THROWS_AS(certify_p2(l4, basis_moments(l4), 1e-6), std::invalid_argument);
}

TEST_CASE("p2 in three dimensions at the squared sphere") {
  // unit ball, so the moment ratios are A and B
  const Polynomial sq = scale_to_target_volume(Polynomial(3, Rational::make(4), 1,
                                          {{{4, 0, 0}, 1.0}, {{0, 4, 0}, 1.0}, {{0, 0, 4}, 1.0},
                                           {{2, 2, 0}, 2.0}, {{2, 0, 2}, 2.0}, {{0, 2, 2}, 2.0}}),
                                                 4.0 * pi / 3.0);
  const Polynomial m = to_convention(sq, Convention::multinomial);
  const MomentTable t = basis_moments(m);
  const double vol = t.normalization.value;
  CHECK(t.at({4, 0, 0}).value / vol == doctest::Approx(3.0 / 35.0).epsilon(1e-6));
  CHECK(t.at({2, 2, 0}).value / vol == doctest::Approx(1.0 / 35.0).epsilon(1e-6));
  CHECK(certify_p2(m, t, 1e-6).pass);
}

TEST_CASE("p2 residual is linear in a coefficient perturbation") {
  const Polynomial p = p2_optimum();
  const MomentTable t = basis_moments(p);
  const double delta = 1e-3;
  const Polynomial q(2, Rational::make(4), 1, {{{4, 0}, 1.0}, {{2, 2}, 1.0 / 3.0 + delta}, {{0, 4}, 1.0}},
                     Convention::multinomial);
  // l2 moves with g22, so recompute the prediction directly
  const double l2 = 2.0 + 6.0 * (1.0 / 3.0 + delta) * (1.0 / 3.0 + delta);
  const double expect = std::abs((1.0 / 3.0 + delta) - l2 * 3.0 * t.at({2, 2}).value / t.normalization.value);
  CHECK(certify_p2(q, t, 1e-6).residual("alpha(2,2)") == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("p3 at the d=2 identity") {
  const GramForm id(2, 2, Matrix::identity(2));
  EngineConfig cf;
  cf.backend = Backend::closed_form;
  const Certificate c = certify_p3(id, moment_matrix(expand_gram(id), 1, cf), 1e-8);
  CHECK(c.pass);
  CHECK(c.matrix_duals.at("Psi").max_abs() <= 1e-8);
}

TEST_CASE("p3 refutes the diagonal Gram of the quartic L_d") {
  const RefutationReport r = refute_ld_for_p3(2, 4);
  CHECK(r.applicable);
  CHECK(r.min_eigenvalue <= -0.01);
  CHECK_FALSE(r.certificate.pass);
  const RefutationReport r3 = refute_ld_for_p3(3, 4);
  CHECK(r3.min_eigenvalue < 0.0);
  const RefutationReport r2 = refute_ld_for_p3(2, 2);
  CHECK_FALSE(r2.applicable);
  CHECK(r2.certificate.pass);
}

TEST_CASE("p3 corner block value") {
  const RefutationReport r = refute_ld_for_p3(2, 4);
  const double rho = closed_form_ball_volume(2, 4.0);
  const Polynomial l4 = ld_polynomial(2, Rational::make(4));
  const double c = 6.0 * 2.0 / (2.0 * rho) * moment(l4, {2, 2}).value;
  CHECK(r.min_eigenvalue == doctest::Approx(-c).epsilon(1e-6));
}

TEST_CASE("p3 preconditions and monotonicity in tol") {
  const GramForm big(2, 2, Matrix::identity(2) * 2.0);
  CHECK_THROWS_AS(certify_p3(big, moment_matrix(expand_gram(big), 1), 1e-6), PreconditionError);
  const GramForm ld = ld_gram(2, 4);
  CHECK_THROWS_AS(certify_p3(ld, moment_matrix(ld_polynomial(2, Rational::make(2)), 1), 1e-6),
                  std::invalid_argument);
  const MomentMatrix m = moment_matrix(expand_gram(ld), 2);
  bool passed = false;
  for (double tol : {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0}) {
    const bool now = certify_p3(ld, m, tol).pass;
    if (passed)
      CHECK(now);
    passed = passed || now;
  }
}

TEST_CASE("certificate json shape") {
  const Polynomial l4 = ld_polynomial(2, Rational::make(4));
  const Json j = to_json(certify_p1(l4, basis_moments(l4), 1e-6));
  CHECK(j["kind"] == "p1_kkt");
  CHECK(j["verdict"] == "pass");
  CHECK(j["tolerance"] == 1e-6);
  CHECK(j["residuals"].is_object());
  CHECK(j["duals"].contains("theta"));
  const Json k = to_json(refute_ld_for_p3(2, 4).certificate);
  CHECK(k["verdict"] == "fail");
  CHECK(k["duals"]["Psi"].is_array());
}

TEST_CASE("stochastic moments widen the allowance") {
  const Polynomial p = p2_optimum();
  EngineConfig mc;
  mc.backend = Backend::monte_carlo;
  mc.budget = 100000;
  const Certificate c = certify_p2(p, basis_moments(p, mc), 1e-2);
  CHECK(c.pass);
  CHECK(c.allowances.at("alpha(2,2)") > 0.0);
}
