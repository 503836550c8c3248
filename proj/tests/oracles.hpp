#pragma once

// Independent reference values. Nothing here calls the library's integrators.

#include "homvol/polynomial.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Integral of prod |x_i|^a_i over {sum |x_i|^d <= 1} (Dirichlet integral).
inline double ld_ball_abs_moment(int n, double d, const std::vector<double> &a) {
  double num = std::pow(2.0, n);
  double s = 0.0;
  for (double ai : a) {
    num *= std::tgamma((ai + 1.0) / d);
    s += (ai + 1.0) / d;
  }
  return num / (std::pow(d, n) * std::tgamma(1.0 + s));
}

inline double ld_ball_volume(int n, double d) {
  return ld_ball_abs_moment(n, d, std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

// Plain midpoint rule for the area of {f <= 1} inside [-half, half]^2.
inline double midpoint_area(const std::function<double(double, double)> &f, double half, int m) {
  const double h = 2.0 * half / m;
  double area = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = -half + (i + 0.5) * h;
      const double y = -half + (j + 0.5) * h;
      if (f(x, y) <= 1.0)
        area += h * h;
    }
  return area;
}

// min over theta of cos^4 + sin^4 - c cos^2 sin^2 for c > -2.
inline double quartic_family_sphere_min(double c) { return (2.0 - c) / 4.0; }

inline double central_difference(const std::function<double(double)> &f, double eps) {
  return (f(eps) - f(-eps)) / (2.0 * eps);
}

// Random binary quartic a x^4 + b x^3 y + c x^2 y^2 + e x y^3 + f y^4 with
// a, f in [0.5, 1.5], the rest in [-0.5, 0.5], kept when min over the unit
// circle exceeds 0.05 (checked on a fine angular scan).
inline homvol::Polynomial random_quartic(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> diag(0.5, 1.5), off(-0.5, 0.5);
  for (;;) {
    const double c[5] = {diag(rng), off(rng), off(rng), off(rng), diag(rng)};
    double mn = 1e300;
    for (int k = 0; k < 3600; ++k) {
      const double t = std::numbers::pi * k / 3600.0;
      const double x = std::cos(t), y = std::sin(t);
      const double v = c[0] * x * x * x * x + c[1] * x * x * x * y + c[2] * x * x * y * y +
                       c[3] * x * y * y * y + c[4] * y * y * y * y;
      mn = std::min(mn, v);
    }
    if (mn > 0.05)
      return homvol::Polynomial::from_dense(2, homvol::Rational::make(4), 1, c);
  }
}

} // namespace oracle
