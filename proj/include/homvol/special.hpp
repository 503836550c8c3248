#pragma once

namespace homvol {

/// Gamma function via the Lanczos approximation (g = 7, nine coefficients).
/// Relative accuracy is about 1e-15 for positive arguments.
double gamma_fn(double z);

/// log(Gamma(z)) for z > 0, same approximation evaluated in log space.
double log_gamma(double z);

} // namespace homvol
