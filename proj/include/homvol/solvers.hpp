#pragma once

#include "homvol/certificates.hpp"
#include "homvol/polynomial.hpp"
#include "homvol/serialize.hpp"
#include "homvol/volume.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace homvol {

struct SolveConfig {
  int max_iters = 2000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  double tol_objective = 1e-12;
  // projected-gradient residual (unit step) accepted as stationary
  double tol_stationarity = 1e-7;
  EngineConfig engine;
  double certificate_tol = 1e-2;
  // defaults to the unit-ball volume rho_d
  std::optional<double> target_volume;
  // outer sample-average rounds for the monte_carlo backend
  int saa_rounds = 3;
  // amplitude of the seeded perturbation in the default start
  double start_noise = 0.2;
};

struct SolveResult {
  std::string problem; // p1, p1q, p2, p2q, p3
  std::variant<std::monostate, Polynomial, GramForm> solution;
  double objective = 0.0;
  double volume = 0.0;
  std::vector<std::pair<double, double>> iterations; // (objective, volume)
  Certificate certificate;
  bool converged = false;

  const Polynomial &polynomial() const { return std::get<Polynomial>(solution); }
  const GramForm &gram() const { return std::get<GramForm>(solution); }
};

/// min ||g||_1 s.t. vol{g <= 1} <= target. q = 1 needs an even integer d;
/// q > 1 needs d*q even. Solution in monomial convention.
SolveResult solve_p1(int n, Rational d, int q, const std::optional<Polynomial> &start = {},
                     const SolveConfig &cfg = {});

/// min sum c_a p_a^2 s.t. vol <= target, p in multinomial convention (q = 1);
/// with q > 1 the plain sum of squares of monomial coefficients.
SolveResult solve_p2(int n, Rational d, int q = 1, const std::optional<Polynomial> &start = {},
                     const SolveConfig &cfg = {});

/// min trace Q s.t. Q PSD, vol{g_Q <= 1} <= target.
SolveResult solve_p3(int n, int d, const std::optional<GramForm> &start = {},
                     const SolveConfig &cfg = {});

/// Default start: the L_d coefficients plus seeded U[-noise, noise] on
/// every basis coefficient, redrawn until the sublevel set is bounded.
Polynomial perturbed_ld_start(int n, Rational d, int q, Convention convention, double noise,
                              std::uint64_t seed);

GramForm scale_to_target_volume(const GramForm &form, double target,
                                const EngineConfig &cfg = {});

Json to_json(const SolveResult &r);

} // namespace homvol
