#pragma once

#include "wxverif/core/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace wxverif {

struct QuadratureOptions {
  /// Relative tolerance handed to the adaptive Gauss-Kronrod rule per piece.
  double rel_tol = 1e-11;
  unsigned max_depth = 18;
  /// A piece whose error estimate exceeds fail_tol * max(1, L1) is reported
  /// as non-convergent.
  double fail_tol = 1e-6;
};

namespace detail {

template <class F>
double integrate_piece(const F& f, double a, double b, const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  double r = 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (std::isfinite(a) && std::isfinite(b)) {
    // The rule's error estimate ignores the interval width, which makes very
    // short pieces recurse to max_depth; integrate over [0, 1] instead.
    const double w = b - a;
    r = Rule::integrate([&](double u) { return f(a + w * u) * w; }, 0.0, 1.0, opt.max_depth,
                        opt.rel_tol, &err, &l1);
  } else {
    r = Rule::integrate(f, a, b, opt.max_depth, opt.rel_tol, &err, &l1);
  }
  if (!std::isfinite(r) || err > opt.fail_tol * std::max(1.0, l1)) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "]: estimate=" << r
       << " error=" << err << " L1=" << l1 << " rel_tol=" << opt.rel_tol;
    throw NumericalError(os.str());
  }
  return r;
}

// Finite piece: one non-adaptive 15-point Kronrod pass when its error
// estimate already meets rel_tol, the adaptive rule otherwise.
template <class F>
double integrate_short_piece(const F& f, double a, double b, const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  const double w = b - a;
  double err = 0.0;
  double l1 = 0.0;
  const double r = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double u) { return f(a + w * u) * w; }, 0.0, 1.0, 0, 0.0, &err, &l1);
  if (std::isfinite(r) && err <= opt.rel_tol * std::max(l1, 1e-300)) return r;
  return integrate_piece(f, a, b, opt);
}

}  // namespace detail

/// Integrates f over the real line, splitting at every finite breakpoint.
/// Kinks and jumps of the integrand must be listed in `breaks`; the pieces
/// outside the outermost breakpoints are mapped onto finite intervals.
template <class F>
double integrate_real_line(const F& f, std::vector<double> breaks,
                           const QuadratureOptions& opt = {}) {
  std::erase_if(breaks, [](double b) { return !std::isfinite(b); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (breaks.empty()) return detail::integrate_piece(f, -inf, inf, opt);

  double total = detail::integrate_piece(f, -inf, breaks.front(), opt);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += detail::integrate_piece(f, breaks[i], breaks[i + 1], opt);
  }
  total += detail::integrate_piece(f, breaks.back(), inf, opt);
  return total;
}

/// Integrates f over [a, b] (either end may be infinite), splitting at any
/// breakpoints that fall strictly inside.
template <class F>
double integrate_between(const F& f, double a, double b, std::vector<double> breaks,
                         const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_between(f, b, a, std::move(breaks), opt);
  std::erase_if(breaks, [&](double x) { return !(x > a && x < b) || !std::isfinite(x); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double lo = a;
  double total = 0.0;
  for (double x : breaks) {
    total += detail::integrate_piece(f, lo, x, opt);
    lo = x;
  }
  return total + detail::integrate_piece(f, lo, b, opt);
}

}  // namespace wxverif
