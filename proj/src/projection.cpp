#include "homvol/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace homvol {

std::vector<double> project_capped_simplex(std::span<const double> v, double radius) {
  if (!(radius >= 0.0))
    throw std::invalid_argument("projection radius must be non-negative");
  std::vector<double> x(v.begin(), v.end());
  double clipped_sum = 0.0;
  for (double &xi : x) {
    xi = std::max(xi, 0.0);
    clipped_sum += xi;
  }
  if (clipped_sum <= radius)
    return x;
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - radius) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0)
      tau = t;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::max(v[i] - tau, 0.0);
  return x;
}

std::vector<double> project_l1_ball(std::span<const double> v, double radius) {
  std::vector<double> mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    mag[i] = std::abs(v[i]);
  std::vector<double> p = project_capped_simplex(mag, radius);
  for (std::size_t i = 0; i < v.size(); ++i)
    p[i] = std::copysign(p[i], v[i]);
  return p;
}

std::vector<double> project_weighted_l2_ball(std::span<const double> v,
                                             std::span<const double> w, double radius) {
  if (v.size() != w.size())
    throw std::invalid_argument("weight vector size mismatch");
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    norm_sq += w[i] * v[i] * v[i];
  std::vector<double> x(v.begin(), v.end());
  const double norm = std::sqrt(norm_sq);
  if (norm > radius)
    for (double &xi : x)
      xi *= radius / norm;
  return x;
}

Matrix project_psd_trace(const Matrix &a, double radius) {
  EigenDecomposition eig = jacobi_eigen(a);
  eig.values = project_capped_simplex(eig.values, radius);
  return reconstruct(eig);
}

} // namespace homvol
