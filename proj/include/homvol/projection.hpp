#pragma once

#include "homvol/linalg.hpp"

#include <span>
#include <vector>

namespace homvol {

/// Euclidean projection onto {x >= 0, sum x <= radius}.
std::vector<double> project_capped_simplex(std::span<const double> v, double radius);

/// Euclidean projection onto {||x||_1 <= radius}: simplex projection of the
/// magnitudes with signs restored. Ties keep input order.
std::vector<double> project_l1_ball(std::span<const double> v, double radius);

/// Projection onto {sum w_i x_i^2 <= radius^2} in the w-weighted inner
/// product, which is radial scaling.
std::vector<double> project_weighted_l2_ball(std::span<const double> v,
                                             std::span<const double> w, double radius);

/// Frobenius projection onto {Q PSD, trace Q <= radius}: eigendecompose,
/// project the eigenvalues onto the capped simplex, rebuild.
Matrix project_psd_trace(const Matrix &a, double radius);

} // namespace homvol
