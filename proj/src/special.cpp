#include "homvol/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace homvol {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double z) {
  double x = kLanczosCoeffs[0];
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i)
    x += kLanczosCoeffs[i] / (z + static_cast<double>(i));
  return x;
}

} // namespace

double gamma_fn(double z) {
  using std::numbers::pi;
  if (z < 0.5) {
    // reflection
    return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
  }
  z -= 1.0;
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) *
         lanczos_series(z);
}

double log_gamma(double z) {
  using std::numbers::pi;
  if (!(z > 0.0))
    throw std::domain_error("log_gamma: argument must be positive");
  if (z < 0.5)
    return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
  z -= 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t +
         std::log(lanczos_series(z));
}

} // namespace homvol
