#include "homvol/solvers.hpp"

#include "homvol/errors.hpp"
#include "homvol/projection.hpp"
#include "homvol/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace homvol {

namespace {

using Vec = std::vector<double>;

int lattice_degree(Rational d, int q, const std::string &problem) {
  if (q < 1)
    throw std::invalid_argument(problem + ": q must be >= 1");
  if (d.num <= 0)
    throw std::invalid_argument(problem + ": degree must be positive");
  if (q == 1) {
    if (!d.is_even_integer())
      throw std::invalid_argument(problem + " with q = 1 needs an even integer degree d (got " +
                                  d.str() + ")");
    return static_cast<int>(d.num);
  }
  if ((d.num * q) % d.den != 0 || ((d.num * q / d.den) % 2) != 0)
    throw std::invalid_argument(problem + " with q = " + std::to_string(q) +
                                " needs d*q to be an even integer, i.e. d in Z_{q/2} (got d = " +
                                d.str() + ")");
  return static_cast<int>(d.num * q / d.den);
}

double pow_int_or_abs(double x, int a, int q, bool signed_mode) {
  if (a == 0)
    return 1.0;
  if (signed_mode)
    return std::pow(x, a);
  return std::pow(std::abs(x), static_cast<double>(a) / q);
}

// Volume and d f / d g_a at many coefficient vectors over one fixed rule.
class Evaluator {
public:
  Evaluator(PreparedRule rule, std::vector<MultiIndex> basis, int q, bool signed_mode)
      : rule_(std::move(rule)), basis_(std::move(basis)) {
    const std::size_t m = basis_.size();
    mono_.resize(rule_.size() * m);
    for (std::size_t j = 0; j < rule_.size(); ++j) {
      const auto x = rule_.point(j);
      for (std::size_t a = 0; a < m; ++a) {
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          v *= pow_int_or_abs(x[i], basis_[a][i], q, signed_mode);
        mono_[j * m + a] = v;
      }
    }
    const double n = rule_.n, d = rule_.d;
    if (rule_.on_sphere) {
      norm0_ = 1.0 / n;
      norm1_ = 1.0 / (n + d);
    } else {
      norm0_ = 1.0 / gamma_fn(1.0 + n / d);
      norm1_ = 1.0 / gamma_fn(1.0 + (n + d) / d);
    }
  }

  struct Result {
    double volume;
    Vec dfdg;
  };

  std::optional<Result> operator()(const Vec &g) const {
    const std::size_t m = basis_.size();
    const double n = rule_.n, d = rule_.d;
    Result r{0.0, Vec(m, 0.0)};
    for (std::size_t j = 0; j < rule_.size(); ++j) {
      const double *row = mono_.data() + j * m;
      double h = 0.0;
      for (std::size_t a = 0; a < m; ++a)
        h += g[a] * row[a];
      double w0, w1;
      if (rule_.on_sphere) {
        if (!(h > 0.0))
          return std::nullopt;
        const double base = std::pow(h, -n / d);
        w0 = rule_.weights[j] * base;
        w1 = w0 / h;
      } else {
        w0 = rule_.weights[j] * std::exp(-h);
        w1 = w0;
      }
      r.volume += w0;
      for (std::size_t a = 0; a < m; ++a)
        r.dfdg[a] += w1 * row[a];
    }
    r.volume *= norm0_;
    if (!std::isfinite(r.volume))
      return std::nullopt;
    for (double &v : r.dfdg)
      v *= -((n + d) / d) * norm1_;
    return r;
  }

  const PreparedRule &rule() const { return rule_; }

private:
  PreparedRule rule_;
  std::vector<MultiIndex> basis_;
  Vec mono_;
  double norm0_ = 0.0;
  double norm1_ = 0.0;
};

// Problem in "minimize volume over a norm ball" form.
struct Space {
  std::function<Vec(const Vec &)> coeffs;   // variable -> monomial-convention g_a
  std::function<Vec(const Vec &)> pullback; // d f/d g -> d f/d x
  Vec metric;                               // diagonal metric weights
  std::function<Vec(const Vec &)> project;  // onto the ball boundary
  std::function<double(const Vec &)> norm;  // objective
  double norm_degree = 1.0;                 // homogeneity of norm in x
};

double dist_sq(const Vec &a, const Vec &b, const Vec &w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct PGRun {
  Vec x;
  double volume = 0.0;
  bool converged = false;
  int iterations = 0;
};

PGRun projected_gradient(const Space &sp, const Evaluator &eval,
                         const std::function<bool(const Vec &)> &extra_ok, Vec x0,
                         const SolveConfig &cfg, double n, double d, double target,
                         std::vector<std::pair<double, double>> &trace) {
  auto evaluate = [&](const Vec &x) -> std::optional<std::pair<double, Vec>> {
    const Vec g = sp.coeffs(x);
    auto r = eval(g);
    if (!r || !extra_ok(g))
      return std::nullopt;
    return std::make_pair(r->volume, sp.pullback(r->dfdg));
  };
  auto record = [&](const Vec &x, double f) {
    const double k = std::pow(f / target, d / n);
    trace.emplace_back(std::pow(k, sp.norm_degree) * sp.norm(x), f);
  };
  auto step_from = [&](const Vec &x, const Vec &grad, double t) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      y[i] = x[i] - t * grad[i] / sp.metric[i];
    return sp.project(y);
  };

  PGRun run;
  run.x = sp.project(x0);
  auto cur = evaluate(run.x);
  if (!cur)
    throw InfeasibleError("solver start has an unbounded sublevel set", 0.0);
  record(run.x, cur->first);
  double t = cfg.initial_step;
  auto acceptable = [&](const std::optional<std::pair<double, Vec>> &e, const Vec &y, double step) {
    return e && e->first <= cur->first - (cfg.armijo / step) * dist_sq(y, run.x, sp.metric);
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    run.iterations = it + 1;
    Vec y = step_from(run.x, cur->second, t);
    auto next = evaluate(y);
    if (!acceptable(next, y, t)) {
      t *= cfg.shrink;
      if (t < 1e-18) {
        run.converged = true;
        break;
      }
      continue;
    }
    // greedy step choice: a longer or shorter step wins if it lowers f more
    for (double factor : {1.0 / cfg.shrink, cfg.shrink}) {
      const double t2 = std::min(t * factor, 1e8);
      Vec y2 = step_from(run.x, cur->second, t2);
      auto next2 = evaluate(y2);
      if (acceptable(next2, y2, t2) && next2->first < next->first) {
        y = std::move(y2);
        next = std::move(next2);
        t = t2;
        break;
      }
    }
    const double rel = (cur->first - next->first) / cur->first;
    run.x = y;
    cur = next;
    record(run.x, cur->first);
    if (rel < cfg.tol_objective) {
      // stationary when the unit-step gradient map barely moves x
      const Vec z = step_from(run.x, cur->second, 1.0);
      double xn = 0.0;
      for (std::size_t i = 0; i < run.x.size(); ++i)
        xn += sp.metric[i] * run.x[i] * run.x[i];
      if (std::sqrt(dist_sq(z, run.x, sp.metric)) <= cfg.tol_stationarity * (1.0 + std::sqrt(xn))) {
        run.converged = true;
        break;
      }
    }
  }
  run.volume = cur->first;
  return run;
}

struct SolveCore {
  Vec x;
  double volume = 0.0;
  bool converged = false;
};

SolveCore run_solver(const Space &sp, const Polynomial &anchor_shape, Vec x0,
                     const std::vector<MultiIndex> &basis, const SolveConfig &cfg, double target,
                     std::vector<std::pair<double, double>> &trace) {
  if (cfg.max_iters < 1)
    throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.tol_objective > 0.0) || !(cfg.armijo > 0.0) || !(cfg.shrink > 0.0 && cfg.shrink < 1.0) ||
      !(cfg.initial_step > 0.0))
    throw std::invalid_argument("solver tolerances and step parameters must be positive");
  const int n = anchor_shape.n();
  const double d = anchor_shape.degree().value();
  const int q = anchor_shape.q();
  const bool signed_mode = anchor_shape.signed_monomials();
  auto as_poly = [&](const Vec &g) {
    return Polynomial::from_dense(n, anchor_shape.degree(), q, g, Convention::monomial);
  };

  SolveCore out;
  out.x = sp.project(x0);
  if (cfg.engine.backend == Backend::monte_carlo) {
    const int rounds = std::max(cfg.saa_rounds, 1);
    for (int r = 0; r < rounds; ++r) {
      EngineConfig ec = cfg.engine;
      ec.seed = cfg.engine.seed + static_cast<std::uint64_t>(r);
      const Polynomial anchor = as_poly(sp.coeffs(out.x));
      PreparedRule rule = prepare_rule(anchor, ec);
      const double s = rule.reference_scale;
      Evaluator eval(std::move(rule), basis, q, signed_mode);
      // weights stay square-integrable while g >= (s/2) sum |x_i|^d
      auto ok = [&](const Vec &g) { return reference_ratio_minimum(as_poly(g), 8, ec.seed) > 0.5 * s; };
      PGRun run = projected_gradient(sp, eval, ok, out.x, cfg, n, d, target, trace);
      out.x = run.x;
      out.volume = run.volume;
      out.converged = run.converged;
    }
    return out;
  }
  if (cfg.engine.backend != Backend::spherical)
    throw std::invalid_argument("solvers support the spherical and monte_carlo backends");
  Evaluator eval(prepare_rule(anchor_shape, cfg.engine), basis, q, signed_mode);
  auto ok = [](const Vec &) { return true; };
  PGRun run = projected_gradient(sp, eval, ok, out.x, cfg, n, d, target, trace);
  out.x = run.x;
  out.volume = run.volume;
  out.converged = run.converged;
  return out;
}

Vec scale_to_norm(Vec x, double current, double radius) {
  if (current > 0.0)
    for (double &v : x)
      v *= radius / current;
  return x;
}

double resolve_target(const SolveConfig &cfg, int n, double d) {
  const double t = cfg.target_volume ? *cfg.target_volume : closed_form_ball_volume(n, d);
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("target volume must be positive and finite");
  return t;
}

void check_start(const Polynomial &s, int n, Rational d, int q) {
  if (s.n() != n || !(s.degree() == d) || s.q() != q)
    throw std::invalid_argument("start polynomial does not match (n, d, q)");
}

} // namespace

Polynomial perturbed_ld_start(int n, Rational d, int q, Convention convention, double noise,
                              std::uint64_t seed) {
  const Polynomial ld = ld_polynomial(n, d, q);
  const auto basis = ld.basis();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-noise, noise);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec c(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k)
      c[k] = ld.coeff(basis[k]) + unif(rng);
    Polynomial p = Polynomial::from_dense(n, d, q, c, convention);
    if (finite_volume_test(p, 16, seed).finite_volume)
      return p;
  }
  throw std::runtime_error("could not draw a feasible perturbed start");
}

SolveResult solve_p1(int n, Rational d, int q, const std::optional<Polynomial> &start,
                     const SolveConfig &cfg) {
  const std::string problem = q == 1 ? "p1" : "p1q";
  lattice_degree(d, q, problem);
  const double dd = d.value();
  const double target = resolve_target(cfg, n, dd);
  const Polynomial shape = ld_polynomial(n, d, q);
  const auto basis = shape.basis();

  Polynomial s0 = start ? to_convention(*start, Convention::monomial)
                        : perturbed_ld_start(n, d, q, Convention::monomial, cfg.start_noise,
                                             cfg.engine.seed);
  check_start(s0, n, d, q);
  Vec x0 = s0.dense();

  const double radius = n;
  Space sp;
  sp.coeffs = [](const Vec &x) { return x; };
  sp.pullback = [](const Vec &g) { return g; };
  sp.metric = Vec(basis.size(), 1.0);
  sp.norm = [](const Vec &x) {
    double s = 0.0;
    for (double v : x)
      s += std::abs(v);
    return s;
  };
  sp.project = [&](const Vec &y) {
    Vec p = project_l1_ball(y, radius);
    return scale_to_norm(p, sp.norm(p), radius);
  };

  SolveResult res;
  res.problem = problem;
  SolveCore core = run_solver(sp, shape, x0, basis, cfg, target, res.iterations);
  const double k = std::pow(core.volume / target, dd / n);
  Vec g = core.x;
  for (double &v : g)
    v *= k;
  Polynomial sol = Polynomial::from_dense(n, d, q, g, Convention::monomial);
  res.converged = core.converged;
  res.objective = sp.norm(g);
  res.volume = volume(sol, cfg.engine).value;
  const Polynomial cert_poly =
      cfg.target_volume ? scale_to_target_volume(sol, closed_form_ball_volume(n, dd), cfg.engine) : sol;
  res.certificate = certify_p1(cert_poly, basis_moments(cert_poly, cfg.engine), cfg.certificate_tol);
  res.solution = std::move(sol);
  return res;
}

SolveResult solve_p2(int n, Rational d, int q, const std::optional<Polynomial> &start,
                     const SolveConfig &cfg) {
  const std::string problem = q == 1 ? "p2" : "p2q";
  lattice_degree(d, q, problem);
  const double dd = d.value();
  const double target = resolve_target(cfg, n, dd);
  const Polynomial shape = ld_polynomial(n, d, q);
  const auto basis = shape.basis();
  const Convention conv = q == 1 ? Convention::multinomial : Convention::monomial;

  Vec weights(basis.size(), 1.0);
  if (q == 1)
    for (std::size_t k = 0; k < basis.size(); ++k)
      weights[k] = static_cast<double>(multinomial_coefficient(basis[k]));

  Polynomial s0 = start ? to_convention(*start, conv)
                        : perturbed_ld_start(n, d, q, conv, cfg.start_noise, cfg.engine.seed);
  check_start(s0, n, d, q);
  Vec x0 = s0.dense();

  const double radius = std::sqrt(static_cast<double>(n));
  Space sp;
  sp.coeffs = [&](const Vec &x) {
    Vec g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
      g[k] = weights[k] * x[k];
    return g;
  };
  sp.pullback = sp.coeffs; // d f/d p_a = c_a d f/d g_a
  sp.metric = weights;
  sp.norm = [&](const Vec &x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      s += weights[k] * x[k] * x[k];
    return s;
  };
  sp.norm_degree = 2.0;
  sp.project = [&](const Vec &y) { return scale_to_norm(y, std::sqrt(sp.norm(y)), radius); };

  SolveResult res;
  res.problem = problem;
  SolveCore core = run_solver(sp, shape, x0, basis, cfg, target, res.iterations);
  const double k = std::pow(core.volume / target, dd / n);
  Vec p = core.x;
  for (double &v : p)
    v *= k;
  Polynomial sol = Polynomial::from_dense(n, d, q, p, conv);
  res.converged = core.converged;
  res.objective = sp.norm(p);
  res.volume = volume(sol, cfg.engine).value;
  res.certificate = certify_p2(sol, basis_moments(sol, cfg.engine), cfg.certificate_tol);
  res.solution = std::move(sol);
  return res;
}

GramForm scale_to_target_volume(const GramForm &form, double target, const EngineConfig &cfg) {
  const Polynomial g = expand_gram(form);
  const VolumeEstimate v = volume(g, cfg);
  const double k = std::pow(v.value / target, static_cast<double>(form.d()) / form.n());
  return GramForm(form.n(), form.d(), form.Q() * k);
}

SolveResult solve_p3(int n, int d, const std::optional<GramForm> &start, const SolveConfig &cfg) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("p3 needs an even degree d >= 2 (got " + std::to_string(d) + ")");
  const double dd = d;
  const double target = resolve_target(cfg, n, dd);
  const Polynomial shape = ld_polynomial(n, Rational::make(d), 1);
  const auto basis = shape.basis();
  const auto half = enumerate_indices(n, d / 2, 1);
  const std::size_t s = half.size();

  // position of alpha + beta in the degree-d basis
  std::vector<std::size_t> slot(s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      MultiIndex gamma(half[i]);
      for (std::size_t k = 0; k < gamma.size(); ++k)
        gamma[k] += half[j][k];
      slot[i * s + j] =
          static_cast<std::size_t>(std::find(basis.begin(), basis.end(), gamma) - basis.begin());
    }

  Matrix q0 = start ? start->Q() : Matrix::identity(s) * (static_cast<double>(n) / s);
  if (start && (start->n() != n || start->d() != d))
    throw std::invalid_argument("start Gram form does not match (n, d)");
  Vec x0(q0.data().begin(), q0.data().end());

  const double radius = n;
  Space sp;
  sp.coeffs = [&](const Vec &x) {
    Vec g(basis.size(), 0.0);
    for (std::size_t k = 0; k < s * s; ++k)
      g[slot[k]] += x[k];
    return g;
  };
  sp.pullback = [&](const Vec &dfdg) {
    Vec out(s * s);
    for (std::size_t k = 0; k < s * s; ++k)
      out[k] = dfdg[slot[k]];
    return out;
  };
  sp.metric = Vec(s * s, 1.0);
  sp.norm = [&](const Vec &x) {
    double t = 0.0;
    for (std::size_t i = 0; i < s; ++i)
      t += x[i * s + i];
    return t;
  };
  sp.project = [&](const Vec &y) {
    Matrix m(s, s);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        m(i, j) = 0.5 * (y[i * s + j] + y[j * s + i]);
    Matrix p = project_psd_trace(m, radius);
    Vec out(p.data().begin(), p.data().end());
    return scale_to_norm(out, p.trace(), radius);
  };

  SolveResult res;
  res.problem = "p3";
  SolveCore core = run_solver(sp, shape, x0, basis, cfg, target, res.iterations);
  const double k = std::pow(core.volume / target, dd / n);
  Matrix qm(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      qm(i, j) = 0.5 * k * (core.x[i * s + j] + core.x[j * s + i]);
  GramForm sol(n, d, qm);
  res.converged = core.converged;
  res.objective = qm.trace();
  const Polynomial g = expand_gram(sol);
  res.volume = volume(g, cfg.engine).value;
  const GramForm cert_form =
      cfg.target_volume ? scale_to_target_volume(sol, closed_form_ball_volume(n, dd), cfg.engine) : sol;
  res.certificate = certify_p3(cert_form, moment_matrix(expand_gram(cert_form), d / 2, cfg.engine),
                               cfg.certificate_tol);
  res.solution = std::move(sol);
  return res;
}

Json to_json(const SolveResult &r) {
  Json j;
  j["problem"] = r.problem;
  j["objective"] = r.objective;
  j["volume"] = r.volume;
  j["solution"] = std::holds_alternative<Polynomial>(r.solution) ? to_json(r.polynomial())
                                                                 : to_json(r.gram());
  Json it = Json::array();
  for (const auto &[o, v] : r.iterations)
    it.push_back(Json::array({o, v}));
  j["iterations"] = it;
  j["certificate"] = to_json(r.certificate);
  j["converged"] = r.converged;
  return j;
}

} // namespace homvol
