#pragma once

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace wxverif::special {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kInvSqrtPi = 0.564189583547756286948079451561;

/// Standard normal density.
inline double phi(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF; erfc keeps both tails accurate.
inline double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal survival function 1 - Phi(z).
inline double Phi_c(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double Phi_inv(double p) {
  if (p <= 0.0) return -INFINITY;
  if (p >= 1.0) return INFINITY;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Density of N(mu, sigma^2) at x.
inline double normal_pdf(double x, double mu, double sigma) {
  return phi((x - mu) / sigma) / sigma;
}

inline double normal_cdf(double x, double mu, double sigma) {
  return Phi((x - mu) / sigma);
}

}  // namespace wxverif::special
