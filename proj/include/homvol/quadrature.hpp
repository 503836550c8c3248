#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace homvol {

struct Node1D {
  double x;
  double w;
};

/// m-point Gauss-Legendre rule on [a, b].
std::vector<Node1D> gauss_legendre(int m, double a, double b);

/// Double-exponential (tanh-sinh) rule with m nodes on [a, b]. Nodes never
/// touch the endpoints, so integrable endpoint singularities are fine.
std::vector<Node1D> tanh_sinh(int m, double a, double b);

/// Cubature on the unit sphere S^{n-1} (surface measure), n in {1, 2, 3}.
/// smooth = true assumes an analytic integrand (periodic trapezoid for n = 2,
/// Gauss-Legendre in the polar angle times trapezoid in azimuth for n = 3).
/// smooth = false splits at the coordinate hyperplanes and uses tanh-sinh on
/// each piece, which handles |x_i|^a kinks at the axes.
struct SphereRule {
  int n = 0;
  std::vector<double> points; // size() * n, row per node
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

SphereRule make_sphere_rule(int n, std::int64_t budget, bool smooth);

struct SphereMinimum {
  double value;
  std::vector<double> argmin;
};

/// Multi-start local minimization of f over the unit sphere. For n = 2 a
/// dense angular scan is refined by golden-section search; for n >= 3 seeded
/// random starts plus axis/diagonal points are refined by compass search.
SphereMinimum minimize_on_sphere(const std::function<double(std::span<const double>)> &f,
                                 int n, int restarts, std::uint64_t seed);

} // namespace homvol
