// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "homvol/certificates.hpp"
#include "homvol/solvers.hpp"
#include "homvol/volume.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace homvol;
using std::numbers::pi;

namespace {

// pinned tolerances
constexpr double kClosedFormTol = 1e-12;
constexpr double kExampleVolumeTol = 1e-6;
constexpr double kExampleMomentTol = 1e-5;
constexpr double kExampleSeconds = 1.0;
constexpr double kRatioTolSpherical = 1e-6;
constexpr double kRatioTolMc = 1e-3;
constexpr std::int64_t kRatioMcSamples = 1000000;
constexpr double kEulerTol = 1e-6;
constexpr int kEulerCount = 20;
constexpr double kGradTol = 1e-4;
constexpr double kGradEps = 1e-4;
constexpr int kGradCount = 10;
constexpr double kP1CoeffTol = 1e-2;
constexpr double kP1ObjTol = 1e-2;
constexpr double kP1SeedTol = 2e-2;
constexpr int kP1Seeds = 5;
constexpr double kP1Seconds = 60.0;
constexpr double kP2CoeffTol = 2e-2;
constexpr double kP2CertTol = 1e-2;
constexpr double kP2RefuteMin = 0.1;
constexpr double kP3IdentityTol = 1e-8;
constexpr double kP3RefuteMax = -0.01;
constexpr double kP3CertTol = 1e-2;
constexpr double kHalfBallTol = 1e-3;
constexpr double kP1qCoeffTol = 1e-2;
constexpr double kHomogeneityTol = 1e-6;
constexpr int kConvexPairs = 20;
constexpr double kAgreementSigmas = 3.0;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EngineConfig engine(Backend b, std::int64_t budget = 0, std::uint64_t seed = kDefaultSeed) {
  EngineConfig c;
  c.backend = b;
  c.budget = budget;
  c.seed = seed;
  return c;
}

Polynomial quartic(double a, double b, double c) {
  return Polynomial(2, Rational::make(4), 1, {{{4, 0}, a}, {{2, 2}, b}, {{0, 4}, c}});
}

void closed_form(Outcome &o) {
  o.require(std::abs(closed_form_ball_volume(2, Rational::make(2)) - pi) <= kClosedFormTol, "rho_2");
  o.require(std::abs(closed_form_ball_volume(2, Rational::make(1)) - 2.0) <= kClosedFormTol, "rho_1");
  o.require(std::abs(closed_form_ball_volume(2, Rational::make(1, 2)) - 2.0 / 3.0) <= kClosedFormTol,
            "rho_1/2");
  o.note << " rho_1/2=" << closed_form_ball_volume(2, Rational::make(1, 2));
}

void squared_disk(Outcome &o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Polynomial g = quartic(1, 2, 1);
  const double v = volume(g).value;
  const double m40 = moment(g, {4, 0}).value;
  const double m22 = moment(g, {2, 2}).value;
  const double secs = seconds_since(t0);
  o.require(std::abs(v - 3.1415926) <= kExampleVolumeTol, "volume");
  o.require(std::abs(m40 - 0.392699) <= kExampleMomentTol, "m40");
  o.require(std::abs(m22 - 0.130899) <= kExampleMomentTol, "m22");
  o.require(secs < kExampleSeconds, "time");
  o.note << " vol=" << v << " m40=" << m40 << " m22=" << m22 << " t=" << secs << "s";
}

void moment_ratio(Outcome &o) {
  for (int d : {2, 4}) {
    const Polynomial g2 = ld_polynomial(2, Rational::make(d));
    const double r2 = moment(g2, {d, 0}).value / volume(g2).value;
    o.require(std::abs(r2 - 1.0 / (2 + d)) <= kRatioTolSpherical, "n=2 d=" + std::to_string(d));
    const Polynomial g3 = ld_polynomial(3, Rational::make(d));
    const MultiIndex a{d, 0, 0};
    const MomentTable t = moment_table(g3, std::vector<MultiIndex>{a},
                                       engine(Backend::monte_carlo, kRatioMcSamples));
    const double r3 = t.at(a).value / t.normalization.value;
    o.require(std::abs(r3 - 1.0 / (3 + d)) <= kRatioTolMc, "n=3 d=" + std::to_string(d));
    o.note << " (3," << d << ")=" << r3;
  }
}

void euler(Outcome &o) {
  std::mt19937_64 rng(20240917);
  double worst = 0.0;
  for (int k = 0; k < kEulerCount; ++k) {
    const EulerResidual r = euler_residual(oracle::random_quartic(rng));
    worst = std::max(worst, std::abs(r.residual) / r.volume);
  }
  o.require(worst <= kEulerTol, "residual");
  o.note << " worst=" << worst;
}

void gradient(Outcome &o) {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int k = 0; k < kGradCount; ++k) {
    const Polynomial g = oracle::random_quartic(rng);
    const Gradient gr = grad_volume(g);
    for (std::size_t i = 0; i < gr.values.size(); ++i) {
      const double fd = oracle::central_difference(
          [&](double e) {
            std::vector<double> c = g.dense();
            c[i] += e;
            return volume(Polynomial::from_dense(2, Rational::make(4), 1, c)).value;
          },
          kGradEps);
      // odd components vanish on both sides; compare them absolutely
      const double scale = std::max(std::abs(fd), std::abs(gr.values[i]));
      const double err = scale > 1e-8 ? std::abs(gr.values[i] - fd) / scale : std::abs(gr.values[i] - fd);
      worst = std::max(worst, err);
    }
  }
  o.require(worst <= kGradTol, "fd");
  o.note << " worst_rel=" << worst;
}

void p1_recovery(Outcome &o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> sols;
  for (int s = 0; s < kP1Seeds; ++s) {
    SolveConfig cfg;
    cfg.engine.seed = kDefaultSeed + static_cast<std::uint64_t>(s);
    const SolveResult r = solve_p1(2, Rational::make(4), 1, {}, cfg);
    const auto c = r.polynomial().dense();
    const double expect[5] = {1, 0, 0, 0, 1};
    for (std::size_t k = 0; k < 5; ++k)
      o.require(std::abs(c[k] - expect[k]) <= kP1CoeffTol, "coeff");
    o.require(std::abs(r.objective - 2.0) <= kP1ObjTol, "objective");
    o.require(r.converged, "converged");
    sols.push_back(c);
    if (s == 0)
      o.note << " obj=" << r.objective;
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      for (std::size_t k = 0; k < 5; ++k)
        spread = std::max(spread, std::abs(sols[i][k] - sols[j][k]));
  const double secs = seconds_since(t0);
  o.require(spread <= kP1SeedTol, "seed spread");
  o.require(secs < kP1Seconds, "time");
  o.note << " spread=" << spread << " t=" << secs << "s";
}

void p2_recovery(Outcome &o) {
  // coefficients (1, 1/3) belong to the unit disk, volume pi
  SolveConfig cfg;
  cfg.target_volume = pi;
  const SolveResult r = solve_p2(2, Rational::make(4), 1, {}, cfg);
  const Polynomial &p = r.polynomial();
  o.require(std::abs(p.coeff({4, 0}) - 1.0) <= kP2CoeffTol, "g40");
  o.require(std::abs(p.coeff({2, 2}) - 1.0 / 3.0) <= kP2CoeffTol, "g22");
  const Certificate c = certify_p2(p, basis_moments(p), kP2CertTol);
  o.require(c.pass && c.max_residual() <= kP2CertTol, "certificate");
  const Polynomial l4 = to_convention(
      scale_to_target_volume(ld_polynomial(2, Rational::make(4)), closed_form_ball_volume(2, 4.0)),
      Convention::multinomial);
  const Certificate bad = certify_p2(l4, basis_moments(l4), kP2CertTol);
  o.require(!bad.pass && bad.residual("alpha(2,2)") >= kP2RefuteMin, "L4 not refuted");
  o.note << " g40=" << p.coeff({4, 0}) << " g22=" << p.coeff({2, 2}) << " res=" << c.max_residual()
         << " L4_res22=" << bad.residual("alpha(2,2)");
}

void p3_certificate(Outcome &o) {
  const GramForm id(2, 2, Matrix::identity(2));
  const Certificate c = certify_p3(id, moment_matrix(expand_gram(id), 1, engine(Backend::closed_form)),
                                   kP3IdentityTol);
  const double psi = c.matrix_duals.at("Psi").frobenius_norm();
  o.require(c.pass && psi <= kP3IdentityTol, "identity");
  const RefutationReport rep = refute_ld_for_p3(2, 4);
  o.require(rep.min_eigenvalue <= kP3RefuteMax, "refutation");
  SolveConfig cfg;
  cfg.certificate_tol = kP3CertTol;
  const SolveResult r = solve_p3(2, 4, {}, cfg);
  const Certificate rc = certify_p3(r.gram(), moment_matrix(expand_gram(r.gram()), 2), kP3CertTol);
  o.require(rc.pass, "solve certificate");
  o.require(r.gram().Q().trace() < 2.0, "trace");
  o.note << " psi=" << psi << " min_eig=" << rep.min_eigenvalue << " trace=" << r.gram().Q().trace();
}

void generalized(Outcome &o) {
  const Polynomial g = ld_polynomial(2, Rational::make(1, 2), 8);
  const VolumeEstimate s = volume(g);
  const VolumeEstimate gr = volume(g, engine(Backend::grid_oracle));
  o.require(std::abs(s.value - 2.0 / 3.0) <= kHalfBallTol, "spherical volume");
  o.require(std::abs(gr.value - 2.0 / 3.0) <= kHalfBallTol, "grid volume");
  const SolveResult r = solve_p1(2, Rational::make(1, 2), 4);
  const Polynomial &p = r.polynomial();
  o.require(std::abs(p.coeff({2, 0}) - 1.0) <= kP1qCoeffTol, "p1q (2,0)");
  o.require(std::abs(p.coeff({1, 1})) <= kP1qCoeffTol, "p1q (1,1)");
  o.require(std::abs(p.coeff({0, 2}) - 1.0) <= kP1qCoeffTol, "p1q (0,2)");
  // q = 8 puts the five order-1/2 moments on the lattice
  const MomentMatrix m = moment_matrix(g, 2);
  for (int k = 0; k <= 4; ++k) {
    const MultiIndex a{4 - k, k};
    o.require(moment(g, a).value > 0.0, "moment positive");
  }
  o.require(hankel_diag_bound_check(m), "hankel");
  o.note << " sph=" << s.value << " grid=" << gr.value << "+-" << gr.std_error;
}

void functional(Outcome &o) {
  const Polynomial non_convex = quartic(1, -1.925, 1);
  double worst_h = 0.0;
  for (const Polynomial &g : {non_convex, quartic(1, 2, 1), ld_polynomial(2, Rational::make(1, 2), 8)})
    for (double lam : {0.5, 2.0}) {
      const double expect = std::pow(lam, -2.0 / g.degree().value()) * volume(g).value;
      worst_h = std::max(worst_h, std::abs(volume(rescale(g, lam)).value - expect) / expect);
    }
  o.require(worst_h <= kHomogeneityTol, "homogeneity");

  std::mt19937_64 rng(777);
  double min_margin = 1e300;
  for (int k = 0; k < kConvexPairs; ++k) {
    const Polynomial g = oracle::random_quartic(rng);
    const Polynomial h = oracle::random_quartic(rng);
    const double margin = 0.5 * (volume(g).value + volume(h).value) - volume(combine(0.5, g, 0.5, h)).value;
    min_margin = std::min(min_margin, margin);
  }
  o.require(min_margin > 0.0, "convexity");

  double worst_z = 0.0;
  for (const Polynomial &g : {non_convex, quartic(1, -1.5, 1), quartic(1, 2, 1),
                              ld_polynomial(2, Rational::make(2)), ld_polynomial(2, Rational::make(1, 2), 8)}) {
    const VolumeEstimate s = volume(g);
    const VolumeEstimate m = volume(g, engine(Backend::monte_carlo));
    const VolumeEstimate r = volume(g, engine(Backend::grid_oracle));
    worst_z = std::max(worst_z, std::abs(s.value - m.value) / std::hypot(s.std_error, m.std_error));
    worst_z = std::max(worst_z, std::abs(s.value - r.value) / std::hypot(s.std_error, r.std_error));
    worst_z = std::max(worst_z, std::abs(m.value - r.value) / std::hypot(m.std_error, r.std_error));
  }
  o.require(worst_z <= kAgreementSigmas, "backend agreement");
  o.note << " homog=" << worst_h << " margin=" << min_margin << " max_z=" << worst_z;
}

} // namespace

int main() {
  const std::pair<const char *, std::function<void(Outcome &)>> criteria[] = {
      {"closed-form ball volumes", closed_form},
      {"squared-disk volume and moments", squared_disk},
      {"axis moment ratio 1/(n+d)", moment_ratio},
      {"Euler identity on random quartics", euler},
      {"gradient vs finite differences", gradient},
      {"P1 recovery of the L_d polynomial", p1_recovery},
      {"P2 recovery and certificate", p2_recovery},
      {"P3 certificate, refutation and solve", p3_certificate},
      {"generalized half ball", generalized},
      {"homogeneity, convexity, backend agreement", functional},
  };
  int failed = 0;
  int idx = 0;
  for (const auto &[name, fn] : criteria) {
    ++idx;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.note << " exception: " << e.what();
    }
    if (!o.pass)
      ++failed;
    std::printf("%s %d %s:%s\n", o.pass ? "PASS" : "FAIL", idx, name, o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
