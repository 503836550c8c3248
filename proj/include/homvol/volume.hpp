#pragma once

#include "homvol/linalg.hpp"
#include "homvol/polynomial.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homvol {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

enum class Backend { closed_form, spherical, monte_carlo, grid_oracle };

std::string to_string(Backend b);
/// Accepts "closed_form", "spherical", "mc"/"monte_carlo", "grid"/"grid_oracle".
Backend backend_from_string(std::string_view s);
bool is_deterministic(Backend b);

struct EngineConfig {
  Backend backend = Backend::spherical;
  std::int64_t budget = 0; // 0 picks default_budget(backend, n)
  std::uint64_t seed = kDefaultSeed;
};

std::int64_t default_budget(Backend b, int n);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Backend backend = Backend::spherical;
  std::int64_t samples_or_nodes = 0;
};

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct MomentTable {
  int n = 0;
  int q = 1;
  std::map<MultiIndex, MomentEstimate, CanonicalOrder> entries;
  VolumeEstimate normalization;
  std::string region; // content hash of the defining polynomial

  bool contains(const MultiIndex &alpha) const { return entries.count(alpha) > 0; }
  /// Throws std::out_of_range naming the missing index.
  const MomentEstimate &at(const MultiIndex &alpha) const;
};

struct MomentMatrix {
  std::vector<MultiIndex> index;
  int q = 1;
  Matrix values;
  Matrix std_errors;
  VolumeEstimate volume;
};

struct FeasibilityVerdict {
  bool finite_volume = false;
  double sphere_minimum = 0.0;
  int restarts = 0;
};

struct Gradient {
  std::vector<MultiIndex> basis;
  std::vector<double> values;
  std::vector<double> std_errors;
  Convention convention = Convention::monomial;
};

struct EulerResidual {
  double residual = 0.0;
  double std_error = 0.0;
  double integral_g = 0.0;
  double volume = 0.0;
};

/// 2^n Gamma(1/d)^n / (n d^(n-1) Gamma(n/d)). Throws std::overflow_error
/// when the value is not representable.
double closed_form_ball_volume(int n, double d);
double closed_form_ball_volume(int n, Rational d);
/// Integral of |x_i|^d over B_d, i.e. the ball volume over (n + d).
double closed_form_ball_moment(int n, double d);
double closed_form_ball_moment(int n, Rational d);

/// Hex FNV-1a digest of the canonical serialization.
std::string content_hash(const Polynomial &g);

FeasibilityVerdict finite_volume_test(const Polynomial &g, int restarts = 16,
                                      std::uint64_t seed = kDefaultSeed,
                                      double tol = 1e-12);

VolumeEstimate volume(const Polynomial &g, const EngineConfig &cfg = {});
MomentEstimate moment(const Polynomial &g, const MultiIndex &alpha,
                      const EngineConfig &cfg = {});

/// Moments for every listed index plus the volume, from one shared sample set.
MomentTable moment_table(const Polynomial &g, std::span<const MultiIndex> alphas,
                         const EngineConfig &cfg = {});
/// All lattice indices of total (numerator sum) 0..max_total_times_q.
MomentTable moments_up_to(const Polynomial &g, int max_total_times_q,
                          const EngineConfig &cfg = {});
/// Moments over the full degree-d basis of g.
MomentTable basis_moments(const Polynomial &g, const EngineConfig &cfg = {});

/// d f / d g_alpha over g.basis(); in the multinomial convention each
/// component carries the factor c_alpha.
Gradient grad_volume(const Polynomial &g, const EngineConfig &cfg = {});

/// M(alpha, beta) = moment(alpha + beta) over enumerate_indices(n, half, q).
MomentMatrix moment_matrix(const Polynomial &g, int half_degree_times_q,
                           const EngineConfig &cfg = {});

EulerResidual euler_residual(const Polynomial &g, const EngineConfig &cfg = {});

/// Every |M(a,b)| is at most the largest pure-power diagonal entry, up to
/// three combined standard errors.
bool hankel_diag_bound_check(const MomentMatrix &m);

/// k g with k = (f(g)/target)^(d/n).
Polynomial scale_to_target_volume(const Polynomial &g, double target,
                                  const EngineConfig &cfg = {});

/// CSV with header alpha_times_q;value;std_error.
std::string to_csv(const MomentTable &table);

/// Fixed integration nodes for repeated evaluation (solvers). A spherical
/// rule integrates h^(-(n+k)/d) over the sphere; a weighted rule is a frozen
/// importance sample of exp(-s sum|x_i|^d).
struct PreparedRule {
  bool on_sphere = true;
  int n = 0;
  double d = 0.0;
  std::vector<double> points; // row per node
  std::vector<double> weights;
  Backend backend = Backend::spherical;
  double reference_scale = 0.0; // s for the weighted rule

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  /// Integral over {g <= 1} of a homogeneous f of degree k, given g and f at
  /// the nodes. Returns nullopt when g <= 0 at a spherical node.
  std::optional<double> integrate(std::span<const double> g_vals,
                                  std::span<const double> f_vals, double k) const;
};

/// Spherical rule for n <= 3 or a frozen Monte Carlo sample otherwise (or on
/// request). The anchor polynomial fixes the rule type and sampling scale.
PreparedRule prepare_rule(const Polynomial &anchor, const EngineConfig &cfg);

/// min over the unit sphere of g / sum |x_i|^d.
double reference_ratio_minimum(const Polynomial &g, int restarts = 16,
                               std::uint64_t seed = kDefaultSeed);

} // namespace homvol
