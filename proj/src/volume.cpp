#include "homvol/volume.hpp"

#include "homvol/errors.hpp"
#include "homvol/quadrature.hpp"
#include "homvol/serialize.hpp"
#include "homvol/special.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace homvol {

std::string to_string(Backend b) {
  switch (b) {
  case Backend::closed_form:
    return "closed_form";
  case Backend::spherical:
    return "spherical";
  case Backend::monte_carlo:
    return "monte_carlo";
  case Backend::grid_oracle:
    return "grid_oracle";
  }
  return "unknown";
}

Backend backend_from_string(std::string_view s) {
  if (s == "closed_form")
    return Backend::closed_form;
  if (s == "spherical")
    return Backend::spherical;
  if (s == "mc" || s == "monte_carlo")
    return Backend::monte_carlo;
  if (s == "grid" || s == "grid_oracle")
    return Backend::grid_oracle;
  throw std::invalid_argument("unknown backend '" + std::string(s) + "'");
}

bool is_deterministic(Backend b) {
  return b == Backend::closed_form || b == Backend::spherical;
}

std::int64_t default_budget(Backend b, int n) {
  switch (b) {
  case Backend::closed_form:
    return 1;
  case Backend::spherical:
    return n <= 2 ? 4096 : 20000;
  case Backend::monte_carlo:
    return 200000;
  case Backend::grid_oracle:
    return n == 1 ? 100000 : (n == 2 ? 1000 : 80);
  }
  return 1;
}

const MomentEstimate &MomentTable::at(const MultiIndex &alpha) const {
  auto it = entries.find(alpha);
  if (it == entries.end()) {
    std::string s;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      s += (i ? "," : "") + std::to_string(alpha[i]);
    throw std::out_of_range("moment table has no entry for alpha_times_q (" + s + ")");
  }
  return it->second;
}

double closed_form_ball_volume(int n, double d) {
  if (n < 1)
    throw std::invalid_argument("closed_form_ball_volume: n must be >= 1");
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::invalid_argument("closed_form_ball_volume: d must be positive");
  const double direct = std::pow(2.0 * gamma_fn(1.0 / d), n) /
                        (n * std::pow(d, n - 1) * gamma_fn(n / d));
  if (std::isfinite(direct) && direct > 0.0)
    return direct;
  const double lg = n * (std::log(2.0) + log_gamma(1.0 / d)) - std::log(static_cast<double>(n)) -
                    (n - 1) * std::log(d) - log_gamma(n / d);
  if (!std::isfinite(lg) || lg > std::log(std::numeric_limits<double>::max()))
    throw std::overflow_error("closed-form ball volume overflows for n=" + std::to_string(n) +
                              ", d=" + std::to_string(d));
  if (lg < std::log(std::numeric_limits<double>::min()))
    throw std::overflow_error("closed-form ball volume underflows for n=" + std::to_string(n) +
                              ", d=" + std::to_string(d));
  return std::exp(lg);
}

double closed_form_ball_volume(int n, Rational d) { return closed_form_ball_volume(n, d.value()); }

double closed_form_ball_moment(int n, double d) { return closed_form_ball_volume(n, d) / (n + d); }

double closed_form_ball_moment(int n, Rational d) { return closed_form_ball_moment(n, d.value()); }

std::string content_hash(const Polynomial &g) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize(g)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char *hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1)
      r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

// Monomial evaluation on a flat exponent row.
struct MonoEval {
  int n;
  int q;
  bool signed_mode;

  double operator()(const int *a, const double *x) const {
    double r = 1.0;
    for (int i = 0; i < n; ++i) {
      if (a[i] == 0)
        continue;
      if (signed_mode)
        r *= ipow(x[i], a[i]);
      else if (q == 1)
        r *= ipow(std::abs(x[i]), a[i]);
      else
        r *= std::pow(std::abs(x[i]), static_cast<double>(a[i]) / q);
    }
    return r;
  }
};

// g in flat form with the multinomial weights folded in.
struct FlatPoly {
  MonoEval mono;
  std::vector<int> exps;
  std::vector<double> coef;

  explicit FlatPoly(const Polynomial &g) : mono{g.n(), g.q(), g.signed_monomials()} {
    for (const auto &[alpha, c] : g.terms()) {
      if (c == 0.0)
        continue;
      double w = c;
      if (g.convention() == Convention::multinomial)
        w *= static_cast<double>(multinomial_coefficient(alpha));
      coef.push_back(w);
      exps.insert(exps.end(), alpha.begin(), alpha.end());
    }
  }

  double operator()(const double *x) const {
    double s = 0.0;
    for (std::size_t t = 0; t < coef.size(); ++t)
      s += coef[t] * mono(exps.data() + t * static_cast<std::size_t>(mono.n), x);
    return s;
  }
};

struct Piece {
  double coef;
  MultiIndex alpha;
};
using Integrand = std::vector<Piece>;

struct RawResult {
  std::vector<MomentEstimate> values;
  std::int64_t nodes = 0;
  Backend backend = Backend::spherical;
};

// Flattened integrands: piece p belongs to integrand owner[p], has degree k[p].
struct FlatIntegrands {
  std::vector<int> owner;
  std::vector<double> coef;
  std::vector<int> exps;
  std::vector<int> degree_slot;
  std::vector<double> degrees; // distinct k values
  std::size_t count = 0;

  FlatIntegrands(const Polynomial &g, const std::vector<Integrand> &in) : count(in.size()) {
    const bool zero_odd = g.reflection_symmetric();
    for (std::size_t j = 0; j < in.size(); ++j)
      for (const auto &p : in[j]) {
        if (p.coef == 0.0 || (zero_odd && has_odd_entry(p.alpha)))
          continue;
        const double k = static_cast<double>(total(p.alpha)) / g.q();
        auto it = std::find(degrees.begin(), degrees.end(), k);
        int slot = static_cast<int>(it - degrees.begin());
        if (it == degrees.end())
          degrees.push_back(k);
        owner.push_back(static_cast<int>(j));
        coef.push_back(p.coef);
        exps.insert(exps.end(), p.alpha.begin(), p.alpha.end());
        degree_slot.push_back(slot);
      }
  }
  std::size_t pieces() const { return owner.size(); }
};

double reference_ratio_minimum_impl(const Polynomial &g, int restarts, std::uint64_t seed) {
  FlatPoly fg(g);
  const double d = g.degree().value();
  auto ratio = [&](std::span<const double> x) {
    double s = 0.0;
    for (double v : x)
      s += std::pow(std::abs(v), d);
    return fg(x.data()) / s;
  };
  return minimize_on_sphere(ratio, g.n(), restarts, seed).value;
}

void require_positive(double m, const char *what) {
  if (!(m > 0.0)) {
    std::ostringstream os;
    os << "sublevel set has infinite volume (" << what << " " << m << ")";
    throw InfeasibleError(os.str(), m);
  }
}

RawResult integrate_spherical(const Polynomial &g, const std::vector<Integrand> &in,
                              std::int64_t budget) {
  const int n = g.n();
  const double d = g.degree().value();
  const SphereRule rule = make_sphere_rule(n, budget, g.signed_monomials());
  const FlatPoly fg(g);
  const FlatIntegrands fi(g, in);
  std::vector<double> acc(fi.count, 0.0);
  std::vector<double> radial(fi.degrees.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double *x = rule.points.data() + k * static_cast<std::size_t>(n);
    const double h = fg(x);
    if (!(h > 0.0))
      throw InfeasibleError("sublevel set has infinite volume (g <= 0 at a sphere node)", h);
    for (std::size_t s = 0; s < fi.degrees.size(); ++s)
      radial[s] = rule.weights[k] * std::pow(h, -(n + fi.degrees[s]) / d) / (n + fi.degrees[s]);
    for (std::size_t p = 0; p < fi.pieces(); ++p)
      acc[static_cast<std::size_t>(fi.owner[p])] +=
          fi.coef[p] * fg.mono(fi.exps.data() + p * static_cast<std::size_t>(n), x) *
          radial[static_cast<std::size_t>(fi.degree_slot[p])];
  }
  RawResult r;
  r.backend = Backend::spherical;
  r.nodes = static_cast<std::int64_t>(rule.size());
  for (double v : acc)
    r.values.push_back({v, 0.0});
  return r;
}

constexpr std::int64_t kBatch = 8192;
constexpr int kGridReplicates = 8;

std::mt19937_64 batch_rng(std::uint64_t seed, std::int64_t batch) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(ss);
}

// Draws from the density proportional to exp(-s sum |x_i|^d); returns sum |x_i|^d.
struct ReferenceSampler {
  int n;
  double d;
  double s;
  std::gamma_distribution<double> gamma;
  std::bernoulli_distribution coin{0.5};

  ReferenceSampler(int n_, double d_, double s_) : n(n_), d(d_), s(s_), gamma(1.0 / d_, 1.0 / s_) {}

  double draw(std::mt19937_64 &rng, double *x) {
    double t_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = gamma(rng);
      t_sum += t;
      const double r = std::pow(t, 1.0 / d);
      x[i] = coin(rng) ? r : -r;
    }
    return t_sum;
  }
  double log_normalizer() const {
    return n * std::log(2.0 * gamma_fn(1.0 + 1.0 / d)) - (n / d) * std::log(s);
  }
};

RawResult integrate_monte_carlo(const Polynomial &g, const std::vector<Integrand> &in,
                                std::int64_t budget, std::uint64_t seed) {
  const int n = g.n();
  const double d = g.degree().value();
  const double s = reference_ratio_minimum_impl(g, 16, seed);
  require_positive(s, "reference ratio minimum");
  const FlatPoly fg(g);
  const FlatIntegrands fi(g, in);
  ReferenceSampler sampler(n, d, s);
  const double z = std::exp(sampler.log_normalizer());
  std::vector<double> gamma_norm(fi.degrees.size());
  for (std::size_t k = 0; k < fi.degrees.size(); ++k)
    gamma_norm[k] = z / gamma_fn(1.0 + (n + fi.degrees[k]) / d);

  std::vector<long double> sum(fi.count, 0.0L), sum_sq(fi.count, 0.0L);
  long double w_sum = 0.0L, w_sq = 0.0L;
  std::vector<double> x(static_cast<std::size_t>(n)), c(fi.count);
  const std::int64_t batches = (budget + kBatch - 1) / kBatch;
  for (std::int64_t b = 0; b < batches; ++b) {
    auto rng = batch_rng(seed, b);
    const std::int64_t m = std::min(kBatch, budget - b * kBatch);
    for (std::int64_t j = 0; j < m; ++j) {
      const double t = sampler.draw(rng, x.data());
      const double w = std::exp(-fg(x.data()) + s * t);
      w_sum += w;
      w_sq += static_cast<long double>(w) * w;
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t p = 0; p < fi.pieces(); ++p)
        c[static_cast<std::size_t>(fi.owner[p])] +=
            fi.coef[p] * fg.mono(fi.exps.data() + p * static_cast<std::size_t>(n), x.data()) *
            gamma_norm[static_cast<std::size_t>(fi.degree_slot[p])];
      for (std::size_t k = 0; k < fi.count; ++k) {
        const long double v = static_cast<long double>(c[k]) * w;
        sum[k] += v;
        sum_sq[k] += v * v;
      }
    }
  }
  const double ess = static_cast<double>(w_sum * w_sum / w_sq);
  const double frac = ess / static_cast<double>(budget);
  if (!(frac >= 0.01)) {
    std::ostringstream os;
    os << "importance weights degenerate: effective sample size " << frac * 100.0
       << "% of budget (g is near the boundary of the finite-volume cone)";
    throw DivergenceError(os.str(), frac);
  }
  RawResult r;
  r.backend = Backend::monte_carlo;
  r.nodes = budget;
  const long double kk = static_cast<long double>(budget);
  for (std::size_t k = 0; k < fi.count; ++k) {
    const long double mean = sum[k] / kk;
    long double var = (sum_sq[k] - kk * mean * mean) / (kk - 1);
    if (var < 0)
      var = 0;
    r.values.push_back({static_cast<double>(mean), static_cast<double>(std::sqrt(var / kk))});
  }
  return r;
}

RawResult integrate_grid(const Polynomial &g, const std::vector<Integrand> &in,
                         std::int64_t budget, std::uint64_t seed) {
  const int n = g.n();
  if (n > 3)
    throw std::invalid_argument("grid oracle supports n <= 3 only");
  const double d = g.degree().value();
  const FeasibilityVerdict fv = finite_volume_test(g, 16, seed);
  require_positive(fv.sphere_minimum, "sphere minimum");
  const double half = std::pow(0.9 * fv.sphere_minimum, -1.0 / d);
  const std::int64_t big_n = std::max<std::int64_t>(budget, 4);
  const double h = 2.0 * half / static_cast<double>(big_n);
  const std::int64_t cells = big_n + 2;
  const std::int64_t verts = cells + 1;

  const FlatPoly fg(g);
  const FlatIntegrands fi(g, in);

  std::int64_t total_verts = 1, total_cells = 1;
  for (int i = 0; i < n; ++i) {
    total_verts *= verts;
    total_cells *= cells;
  }
  std::vector<unsigned char> inside_v(static_cast<std::size_t>(total_verts));
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> shift(static_cast<std::size_t>(n));
  auto center = [&](int axis, std::int64_t j) {
    return -half - h + (static_cast<double>(j) + shift[static_cast<std::size_t>(axis)]) * h;
  };
  const double cell_vol = std::pow(h, n);
  std::vector<double> rep_sum(fi.count, 0.0), rep_sq(fi.count, 0.0), model_sq(fi.count, 0.0);
  std::vector<double> sum(fi.count), boundary_sq(fi.count), c(fi.count);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));

  for (int rep = 0; rep < kGridReplicates; ++rep) {
    auto rng = batch_rng(seed, rep);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double &u : shift)
      u = unif(rng);
    for (std::int64_t lin = 0; lin < total_verts; ++lin) {
      std::int64_t r = lin;
      for (int i = n - 1; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = center(i, r % verts) - 0.5 * h;
        r /= verts;
      }
      inside_v[static_cast<std::size_t>(lin)] = fg(x.data()) <= 1.0;
    }
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(boundary_sq.begin(), boundary_sq.end(), 0.0);
    for (std::int64_t lin = 0; lin < total_cells; ++lin) {
      std::int64_t r = lin;
      for (int i = n - 1; i >= 0; --i) {
        idx[static_cast<std::size_t>(i)] = r % cells;
        r /= cells;
      }
      bool any_in = false, any_out = false;
      for (int corner = 0; corner < (1 << n); ++corner) {
        std::int64_t v = 0;
        for (int i = 0; i < n; ++i)
          v = v * verts + idx[static_cast<std::size_t>(i)] + ((corner >> i) & 1);
        (inside_v[static_cast<std::size_t>(v)] ? any_in : any_out) = true;
      }
      for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = center(i, idx[static_cast<std::size_t>(i)]);
      const bool in_center = fg(x.data()) <= 1.0;
      // a thin spike can cross a cell without touching its corners
      const bool boundary = (any_in && any_out) || (in_center != any_in);
      if (!boundary && !in_center)
        continue;
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t p = 0; p < fi.pieces(); ++p)
        c[static_cast<std::size_t>(fi.owner[p])] +=
            fi.coef[p] * fg.mono(fi.exps.data() + p * static_cast<std::size_t>(n), x.data());
      for (std::size_t k = 0; k < fi.count; ++k) {
        const double v = cell_vol * c[k];
        if (in_center)
          sum[k] += v;
        if (boundary)
          boundary_sq[k] += v * v;
      }
    }
    for (std::size_t k = 0; k < fi.count; ++k) {
      rep_sum[k] += sum[k];
      rep_sq[k] += sum[k] * sum[k];
      model_sq[k] += boundary_sq[k] / 3.0;
    }
  }
  RawResult r;
  r.backend = Backend::grid_oracle;
  r.nodes = total_cells * kGridReplicates;
  const double reps = kGridReplicates;
  for (std::size_t k = 0; k < fi.count; ++k) {
    const double mean = rep_sum[k] / reps;
    const double spread = std::max(0.0, (rep_sq[k] - reps * mean * mean) / (reps - 1)) / reps;
    // cell model: each replicate's variance, averaged over replicates
    const double model = model_sq[k] / (reps * reps);
    r.values.push_back({mean, std::sqrt(std::max(spread, model))});
  }
  return r;
}

// g = c * sum_i |x_i|^d with c > 0, or nullopt.
std::optional<double> ld_multiple(const Polynomial &g) {
  if (static_cast<int>(g.terms().size()) != g.n())
    return std::nullopt;
  std::optional<double> c;
  for (const auto &[alpha, coeff] : g.terms()) {
    int nonzero = 0;
    for (int a : alpha)
      nonzero += a != 0;
    if (nonzero != 1 || coeff <= 0.0 || (c && *c != coeff))
      return std::nullopt;
    c = coeff;
  }
  return c;
}

RawResult integrate_closed_form(const Polynomial &g, const std::vector<Integrand> &in) {
  const auto c = ld_multiple(g);
  if (!c)
    throw std::invalid_argument("closed_form backend needs a positive multiple of sum |x_i|^d");
  const int n = g.n();
  const double d = g.degree().value();
  const double rho = closed_form_ball_volume(n, d);
  RawResult r;
  r.backend = Backend::closed_form;
  r.nodes = 1;
  for (const auto &integrand : in) {
    double v = 0.0;
    for (const auto &p : integrand) {
      const int t = total(p.alpha);
      int nonzero = 0;
      for (int a : p.alpha)
        nonzero += a != 0;
      if (t == 0)
        v += p.coef * rho * std::pow(*c, -n / d);
      else if (g.signed_monomials() && has_odd_entry(p.alpha))
        continue;
      else if (nonzero == 1 && t == g.degree_times_q())
        v += p.coef * rho / (n + d) * std::pow(*c, -(n + d) / d);
      else
        throw std::invalid_argument("closed_form backend has no formula for this moment");
    }
    r.values.push_back({v, 0.0});
  }
  return r;
}

RawResult integrate(const Polynomial &g, const std::vector<Integrand> &in, const EngineConfig &cfg) {
  const std::int64_t budget = cfg.budget > 0 ? cfg.budget : default_budget(cfg.backend, g.n());
  switch (cfg.backend) {
  case Backend::closed_form:
    return integrate_closed_form(g, in);
  case Backend::spherical:
    return integrate_spherical(g, in, budget);
  case Backend::monte_carlo:
    return integrate_monte_carlo(g, in, budget, cfg.seed);
  case Backend::grid_oracle:
    return integrate_grid(g, in, budget, cfg.seed);
  }
  throw std::invalid_argument("unknown backend");
}

VolumeEstimate make_volume(const RawResult &r, std::size_t k) {
  return {r.values[k].value, r.values[k].std_error, r.backend, r.nodes};
}

MultiIndex zero_index(int n) { return MultiIndex(static_cast<std::size_t>(n), 0); }

void check_alpha(const Polynomial &g, const MultiIndex &alpha) {
  if (static_cast<int>(alpha.size()) != g.n())
    throw std::invalid_argument("moment index length differs from n");
  for (int a : alpha)
    if (a < 0)
      throw std::invalid_argument("moment index has a negative entry");
}

} // namespace

double reference_ratio_minimum(const Polynomial &g, int restarts, std::uint64_t seed) {
  return reference_ratio_minimum_impl(g, restarts, seed);
}

FeasibilityVerdict finite_volume_test(const Polynomial &g, int restarts, std::uint64_t seed,
                                      double tol) {
  const FlatPoly fg(g);
  auto f = [&](std::span<const double> x) { return fg(x.data()); };
  const SphereMinimum m = minimize_on_sphere(f, g.n(), restarts, seed);
  return {m.value > tol, m.value, restarts};
}

VolumeEstimate volume(const Polynomial &g, const EngineConfig &cfg) {
  const RawResult r = integrate(g, {{{1.0, zero_index(g.n())}}}, cfg);
  return make_volume(r, 0);
}

MomentEstimate moment(const Polynomial &g, const MultiIndex &alpha, const EngineConfig &cfg) {
  check_alpha(g, alpha);
  if (g.reflection_symmetric() && has_odd_entry(alpha))
    return {0.0, 0.0};
  return integrate(g, {{{1.0, alpha}}}, cfg).values[0];
}

MomentTable moment_table(const Polynomial &g, std::span<const MultiIndex> alphas,
                         const EngineConfig &cfg) {
  std::vector<Integrand> in;
  in.push_back({{1.0, zero_index(g.n())}});
  for (const auto &a : alphas) {
    check_alpha(g, a);
    in.push_back({{1.0, a}});
  }
  const RawResult r = integrate(g, in, cfg);
  MomentTable t;
  t.n = g.n();
  t.q = g.q();
  t.normalization = make_volume(r, 0);
  t.region = content_hash(g);
  t.entries[zero_index(g.n())] = r.values[0];
  for (std::size_t k = 0; k < alphas.size(); ++k)
    t.entries[alphas[k]] = r.values[k + 1];
  return t;
}

MomentTable moments_up_to(const Polynomial &g, int max_total_times_q, const EngineConfig &cfg) {
  std::vector<MultiIndex> alphas;
  for (int t = 1; t <= max_total_times_q; ++t)
    for (auto &a : enumerate_indices(g.n(), t, g.q()))
      alphas.push_back(std::move(a));
  return moment_table(g, alphas, cfg);
}

MomentTable basis_moments(const Polynomial &g, const EngineConfig &cfg) {
  const auto basis = g.basis();
  return moment_table(g, basis, cfg);
}

Gradient grad_volume(const Polynomial &g, const EngineConfig &cfg) {
  const MomentTable t = basis_moments(g, cfg);
  const double n = g.n();
  const double d = g.degree().value();
  Gradient grad;
  grad.basis = g.basis();
  grad.convention = g.convention();
  for (const auto &a : grad.basis) {
    double factor = -(n + d) / d;
    if (g.convention() == Convention::multinomial)
      factor *= static_cast<double>(multinomial_coefficient(a));
    const auto &m = t.at(a);
    grad.values.push_back(factor * m.value);
    grad.std_errors.push_back(std::abs(factor) * m.std_error);
  }
  return grad;
}

MomentMatrix moment_matrix(const Polynomial &g, int half_degree_times_q, const EngineConfig &cfg) {
  MomentMatrix mm;
  mm.q = g.q();
  mm.index = enumerate_indices(g.n(), half_degree_times_q, g.q());
  const std::size_t s = mm.index.size();
  std::vector<MultiIndex> sums;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j) {
      MultiIndex gamma(mm.index[i].size());
      for (std::size_t k = 0; k < gamma.size(); ++k)
        gamma[k] = mm.index[i][k] + mm.index[j][k];
      if (std::find(sums.begin(), sums.end(), gamma) == sums.end())
        sums.push_back(gamma);
    }
  const MomentTable t = moment_table(g, sums, cfg);
  mm.values = Matrix(s, s);
  mm.std_errors = Matrix(s, s);
  mm.volume = t.normalization;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      MultiIndex gamma(mm.index[i].size());
      for (std::size_t k = 0; k < gamma.size(); ++k)
        gamma[k] = mm.index[i][k] + mm.index[j][k];
      const auto &e = t.at(gamma);
      mm.values(i, j) = e.value;
      mm.std_errors(i, j) = e.std_error;
    }
  return mm;
}

EulerResidual euler_residual(const Polynomial &g, const EngineConfig &cfg) {
  const double n = g.n();
  const double d = g.degree().value();
  Integrand ig;
  for (const auto &[alpha, c] : g.terms()) {
    double w = c;
    if (g.convention() == Convention::multinomial)
      w *= static_cast<double>(multinomial_coefficient(alpha));
    ig.push_back({w, alpha});
  }
  Integrand res = ig;
  res.push_back({-n / (n + d), zero_index(g.n())});
  const RawResult r = integrate(g, {res, ig, {{1.0, zero_index(g.n())}}}, cfg);
  return {r.values[0].value, r.values[0].std_error, r.values[1].value, r.values[2].value};
}

bool hankel_diag_bound_check(const MomentMatrix &m) {
  const std::size_t s = m.index.size();
  double bound = -std::numeric_limits<double>::infinity();
  double bound_se = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    int nonzero = 0;
    for (int a : m.index[i])
      nonzero += a != 0;
    if (nonzero <= 1 && m.values(i, i) > bound) {
      bound = m.values(i, i);
      bound_se = m.std_errors(i, i);
    }
  }
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const double slack = 3.0 * std::hypot(m.std_errors(i, j), bound_se);
      if (std::abs(m.values(i, j)) > bound + slack)
        return false;
    }
  return true;
}

Polynomial scale_to_target_volume(const Polynomial &g, double target, const EngineConfig &cfg) {
  if (!(target > 0.0) || !std::isfinite(target))
    throw std::invalid_argument("target volume must be positive and finite");
  const VolumeEstimate v = volume(g, cfg);
  if (!(v.value > 0.0) || !std::isfinite(v.value))
    throw InfeasibleError("volume estimate is not finite and positive", v.value);
  const double k = std::pow(v.value / target, g.degree().value() / g.n());
  return rescale(g, k);
}

namespace {
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
} // namespace

std::string to_csv(const MomentTable &table) {
  std::string out = "alpha_times_q;value;std_error\n";
  for (const auto &[alpha, e] : table.entries) {
    for (std::size_t i = 0; i < alpha.size(); ++i)
      out += (i ? "," : "") + std::to_string(alpha[i]);
    out += ";" + fmt(e.value) + ";" + fmt(e.std_error) + "\n";
  }
  return out;
}

std::optional<double> PreparedRule::integrate(std::span<const double> g_vals,
                                              std::span<const double> f_vals, double k) const {
  double acc = 0.0;
  if (on_sphere) {
    const double e = -(n + k) / d;
    for (std::size_t j = 0; j < size(); ++j) {
      if (!(g_vals[j] > 0.0))
        return std::nullopt;
      acc += weights[j] * f_vals[j] * std::pow(g_vals[j], e);
    }
    return acc / (n + k);
  }
  for (std::size_t j = 0; j < size(); ++j)
    acc += weights[j] * f_vals[j] * std::exp(-g_vals[j]);
  return acc / gamma_fn(1.0 + (n + k) / d);
}

PreparedRule prepare_rule(const Polynomial &anchor, const EngineConfig &cfg) {
  PreparedRule rule;
  rule.n = anchor.n();
  rule.d = anchor.degree().value();
  rule.backend = cfg.backend;
  const std::int64_t budget = cfg.budget > 0 ? cfg.budget : default_budget(cfg.backend, rule.n);
  if (cfg.backend == Backend::spherical) {
    SphereRule sr = make_sphere_rule(rule.n, budget, anchor.signed_monomials());
    rule.points = std::move(sr.points);
    rule.weights = std::move(sr.weights);
    return rule;
  }
  if (cfg.backend != Backend::monte_carlo)
    throw std::invalid_argument("prepared rules support the spherical and monte_carlo backends");
  rule.on_sphere = false;
  const double s = reference_ratio_minimum_impl(anchor, 16, cfg.seed);
  require_positive(s, "reference ratio minimum");
  rule.reference_scale = s;
  ReferenceSampler sampler(rule.n, rule.d, s);
  const double log_z = sampler.log_normalizer() - std::log(static_cast<double>(budget));
  rule.points.resize(static_cast<std::size_t>(budget * rule.n));
  rule.weights.resize(static_cast<std::size_t>(budget));
  const std::int64_t batches = (budget + kBatch - 1) / kBatch;
  for (std::int64_t b = 0; b < batches; ++b) {
    auto rng = batch_rng(cfg.seed, b);
    const std::int64_t m = std::min(kBatch, budget - b * kBatch);
    for (std::int64_t j = 0; j < m; ++j) {
      const std::int64_t row = b * kBatch + j;
      const double t = sampler.draw(rng, rule.points.data() + row * rule.n);
      rule.weights[static_cast<std::size_t>(row)] = std::exp(log_z + s * t);
    }
  }
  return rule;
}

} // namespace homvol
