#include "homvol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <stdexcept>

namespace homvol {

using std::numbers::pi;

std::vector<Node1D> gauss_legendre(int m, double a, double b) {
  if (m < 1)
    throw std::invalid_argument("gauss_legendre: need at least one node");
  std::vector<Node1D> nodes(static_cast<std::size_t>(m));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = {mid - half * z, half * w};
    nodes[static_cast<std::size_t>(m - 1 - i)] = {mid + half * z, half * w};
  }
  return nodes;
}

std::vector<Node1D> tanh_sinh(int m, double a, double b) {
  if (m < 3)
    throw std::invalid_argument("tanh_sinh: need at least three nodes");
  const int k_max = (m - 1) / 2;
  constexpr double t_max = 3.2;
  const double step = t_max / k_max;
  std::vector<Node1D> nodes;
  nodes.reserve(static_cast<std::size_t>(2 * k_max + 1));
  for (int k = -k_max; k <= k_max; ++k) {
    const double t = k * step;
    const double u = 0.5 * pi * std::sinh(t);
    // s = (1 + tanh u)/2 and 1 - s without cancellation
    const double s_lo = 1.0 / (1.0 + std::exp(2.0 * u));  // 1 - s
    const double s_hi = 1.0 / (1.0 + std::exp(-2.0 * u)); // s
    const double x = u < 0 ? a + (b - a) * s_hi : b - (b - a) * s_lo;
    const double w = (b - a) * 2.0 * s_hi * s_lo * 0.5 * pi * std::cosh(t) * step;
    if (w > 0.0 && x > a && x < b)
      nodes.push_back({x, w});
  }
  return nodes;
}

SphereRule make_sphere_rule(int n, std::int64_t budget, bool smooth) {
  SphereRule rule;
  rule.n = n;
  if (n == 1) {
    rule.points = {1.0, -1.0};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (n == 2) {
    if (smooth) {
      const std::int64_t m = std::max<std::int64_t>(budget, 8);
      const double w = 2.0 * pi / static_cast<double>(m);
      for (std::int64_t k = 0; k < m; ++k) {
        const double th = w * static_cast<double>(k);
        rule.points.push_back(std::cos(th));
        rule.points.push_back(std::sin(th));
        rule.weights.push_back(w);
      }
    } else {
      const int m = static_cast<int>(std::max<std::int64_t>(budget / 4, 9));
      for (int quadrant = 0; quadrant < 4; ++quadrant) {
        for (const auto &nd : tanh_sinh(m, quadrant * 0.5 * pi, (quadrant + 1) * 0.5 * pi)) {
          rule.points.push_back(std::cos(nd.x));
          rule.points.push_back(std::sin(nd.x));
          rule.weights.push_back(nd.w);
        }
      }
    }
    return rule;
  }
  if (n == 3) {
    // about 2 m^2 nodes: m polar, 2m azimuthal
    const int m = static_cast<int>(std::max(8.0, std::sqrt(static_cast<double>(budget) / 2.0)));
    std::vector<Node1D> polar;
    std::vector<Node1D> azimuth;
    if (smooth) {
      polar = gauss_legendre(m, 0.0, pi);
      const int ma = 2 * m;
      for (int k = 0; k < ma; ++k)
        azimuth.push_back({2.0 * pi * k / ma, 2.0 * pi / ma});
    } else {
      for (int half = 0; half < 2; ++half)
        for (const auto &nd : tanh_sinh(std::max(m / 2, 9) | 1, half * 0.5 * pi, (half + 1) * 0.5 * pi))
          polar.push_back(nd);
      for (int quadrant = 0; quadrant < 4; ++quadrant)
        for (const auto &nd : tanh_sinh(std::max(m / 2, 9) | 1, quadrant * 0.5 * pi, (quadrant + 1) * 0.5 * pi))
          azimuth.push_back(nd);
    }
    for (const auto &p : polar) {
      const double st = std::sin(p.x);
      const double ct = std::cos(p.x);
      for (const auto &a : azimuth) {
        rule.points.push_back(st * std::cos(a.x));
        rule.points.push_back(st * std::sin(a.x));
        rule.points.push_back(ct);
        rule.weights.push_back(p.w * a.w * st);
      }
    }
    return rule;
  }
  throw std::invalid_argument("spherical cubature supports n <= 3 only");
}

namespace {

double golden_section(const std::function<double(double)> &f, double lo, double hi,
                      double &best_x) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-13) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
  }
  best_x = 0.5 * (lo + hi);
  return f(best_x);
}

void normalize(std::vector<double> &x) {
  double s = 0.0;
  for (double v : x)
    s += v * v;
  s = std::sqrt(s);
  for (double &v : x)
    v /= s;
}

} // namespace

SphereMinimum minimize_on_sphere(const std::function<double(std::span<const double>)> &f,
                                 int n, int restarts, std::uint64_t seed) {
  if (n < 1)
    throw std::invalid_argument("minimize_on_sphere: n must be >= 1");
  restarts = std::max(restarts, 1);

  if (n == 1) {
    const double a = f(std::vector<double>{1.0});
    const double b = f(std::vector<double>{-1.0});
    return a <= b ? SphereMinimum{a, {1.0}} : SphereMinimum{b, {-1.0}};
  }

  if (n == 2) {
    auto at = [&](double th) {
      const double x[2] = {std::cos(th), std::sin(th)};
      return f(x);
    };
    const int m = std::max(720, 96 * restarts);
    std::vector<double> vals(static_cast<std::size_t>(m));
    const double step = 2.0 * pi / m;
    for (int k = 0; k < m; ++k)
      vals[static_cast<std::size_t>(k)] = at(step * k);
    std::vector<int> minima;
    for (int k = 0; k < m; ++k) {
      const double v = vals[static_cast<std::size_t>(k)];
      if (v <= vals[static_cast<std::size_t>((k + m - 1) % m)] &&
          v <= vals[static_cast<std::size_t>((k + 1) % m)])
        minima.push_back(k);
    }
    std::sort(minima.begin(), minima.end(), [&](int a, int b) {
      return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
    });
    if (minima.size() > static_cast<std::size_t>(restarts))
      minima.resize(static_cast<std::size_t>(restarts));
    SphereMinimum best{std::numeric_limits<double>::infinity(), {1.0, 0.0}};
    for (int k : minima) {
      double th = step * k;
      double v = vals[static_cast<std::size_t>(k)];
      double th_ref = th;
      const double v_ref = golden_section(at, th - step, th + step, th_ref);
      if (v_ref < v) {
        v = v_ref;
        th = th_ref;
      }
      if (v < best.value)
        best = {v, {std::cos(th), std::sin(th)}};
    }
    return best;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> candidates;
  for (int i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(i)] = s;
      candidates.push_back(e);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          std::vector<double> e(static_cast<std::size_t>(n), 0.0);
          e[static_cast<std::size_t>(i)] = si;
          e[static_cast<std::size_t>(j)] = sj;
          normalize(e);
          candidates.push_back(e);
        }
  if (n <= 8)
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<double> e(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        e[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1.0 : 1.0;
      normalize(e);
      candidates.push_back(e);
    }
  for (int k = 0; k < 64 * restarts; ++k) {
    std::vector<double> e(static_cast<std::size_t>(n));
    for (double &v : e)
      v = normal(rng);
    normalize(e);
    candidates.push_back(e);
  }

  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    scored.emplace_back(f(candidates[k]), k);
  std::sort(scored.begin(), scored.end());
  if (scored.size() > static_cast<std::size_t>(restarts))
    scored.resize(static_cast<std::size_t>(restarts));

  SphereMinimum best{std::numeric_limits<double>::infinity(), {}};
  for (auto [value, idx] : scored) {
    std::vector<double> x = candidates[idx];
    double fx = value;
    for (double s = 0.05; s > 1e-10;) {
      bool improved = false;
      for (int i = 0; i < n && !improved; ++i)
        for (double sign : {1.0, -1.0}) {
          std::vector<double> y = x;
          y[static_cast<std::size_t>(i)] += sign * s;
          normalize(y);
          const double fy = f(y);
          if (fy < fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      if (!improved)
        s *= 0.5;
    }
    if (fx < best.value)
      best = {fx, x};
  }
  return best;
}

} // namespace homvol
