#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/quadrature.hpp"
#include "wxverif/core/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace wxverif {

/// E_F[w(X)] at or below this value means F_w is undefined.
inline constexpr double kWeightedMassFloor = 1e-12;

/// Inverse survival function, accurate deep in the right tail.
inline double isf(const Parametric& f, double p) {
  if (p <= 0.0) return INFINITY;
  if (p >= 1.0) return -INFINITY;
  if (const auto* n = std::get_if<Normal>(&f)) return n->mean() - n->sd() * special::Phi_inv(p);
  if (const auto* l = std::get_if<Logistic>(&f)) return l->location() + l->scale() * std::log((1.0 - p) / p);
  const auto& t = std::get<StudentT>(f);
  return 2.0 * t.location() - t.quantile(p);
}

namespace detail {

// P(a < X <= b) from the tail that keeps precision; a difference of two
// values near one would leave only rounding noise.
inline double prob_between(const Parametric& f, double a, double b) {
  if (!(a < b)) return 0.0;
  if (b != INFINITY && cdf(f, b) <= 0.5) return cdf(f, b) - (a == -INFINITY ? 0.0 : cdf(f, a));
  if (a != -INFINITY && sf(f, a) <= 0.5) return sf(f, a) - (b == INFINITY ? 0.0 : sf(f, b));
  return 1.0 - (a == -INFINITY ? 0.0 : cdf(f, a)) - (b == INFINITY ? 0.0 : sf(f, b));
}

// Product of the N(mu_w, sigma_w^2) density weight with the N(m, s^2)
// forecast density: scale * density of N(centre, spread^2).
struct GaussProduct {
  double scale;
  double centre;
  double spread;
};

inline GaussProduct gauss_product(double mu_w, double sigma_w, const Normal& f) {
  const double vw = sigma_w * sigma_w;
  const double vf = f.variance();
  const double tot = vw + vf;
  return {special::normal_pdf(f.mean(), mu_w, std::sqrt(tot)), (mu_w * vf + f.mean() * vw) / tot,
          std::sqrt(vw * vf / tot)};
}

// Breakpoints that resolve the shape of w*f for quadrature.
inline std::vector<double> weighted_breaks(const Parametric& f, const WeightFunction& w) {
  std::vector<double> b = support_breaks(f);
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          b.push_back(c.threshold);
          const double tail = sf(f, c.threshold);
          if (tail > 0.0) {
            for (double q : {0.5, 0.1, 1e-3, 1e-6, 1e-10}) b.push_back(isf(f, tail * q));
          }
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          b.push_back(c.threshold);
          const double head = cdf(f, c.threshold);
          if (head > 0.0) {
            for (double q : {0.5, 0.1, 1e-3, 1e-6, 1e-10}) b.push_back(quantile(f, head * q));
          }
        } else if constexpr (is_univariate_gauss_v<T>) {
          for (double k : {-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0}) b.push_back(c.mu + k * c.sigma);
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          b.push_back(c.lower.at(0));
          b.push_back(c.upper.at(0));
        }
      },
      w);
  std::erase_if(b, [](double x) { return !std::isfinite(x); });
  return b;
}

inline void require_univariate(const WeightFunction& w) {
  const auto d = weight_dimension(w);
  require(!d || *d == 1, "weighted distribution: weight must be univariate");
}

}  // namespace detail

/// E_F[1{X <= x} w(X)]: closed form where one exists, quadrature otherwise.
inline double lower_weighted_mass(const Parametric& f, const WeightFunction& w, double x,
                                  const QuadratureOptions& opt = {}) {
  detail::require_univariate(w);
  if (x == -INFINITY) return 0.0;
  const Normal* nf = std::get_if<Normal>(&f);
  const auto closed = std::visit(
      [&](const auto& c) -> std::optional<double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          return x == INFINITY ? 1.0 : cdf(f, x);
        } else if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          return detail::prob_between(f, c.threshold, x);
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          return cdf(f, std::min(x, c.threshold));
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          return detail::prob_between(f, c.lower.at(0), std::min(x, c.upper.at(0)));
        } else if constexpr (std::is_same_v<T, weights::GaussPdf>) {
          if (!nf) return std::nullopt;
          detail::check_sigma(c.sigma);
          const auto g = detail::gauss_product(c.mu, c.sigma, *nf);
          return g.scale * special::Phi((x - g.centre) / g.spread);
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussPdfRatio>) {
          if (!nf) return std::nullopt;
          detail::check_sigma(c.sigma);
          const auto g = detail::gauss_product(c.mu, c.sigma, *nf);
          const double base = x == INFINITY ? 1.0 : cdf(f, x);
          return base - c.sigma * std::sqrt(2.0 * std::numbers::pi) * g.scale *
                            special::Phi((x - g.centre) / g.spread);
        } else if constexpr (std::is_same_v<T, weights::GaussCdf>) {
          if (!nf || x != INFINITY) return std::nullopt;
          detail::check_sigma(c.sigma);
          return special::Phi((nf->mean() - c.mu) / std::hypot(c.sigma, nf->sd()));
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussCdf>) {
          if (!nf || x != INFINITY) return std::nullopt;
          detail::check_sigma(c.sigma);
          return special::Phi_c((nf->mean() - c.mu) / std::hypot(c.sigma, nf->sd()));
        } else {
          return std::nullopt;
        }
      },
      w);
  if (closed) return std::max(*closed, 0.0);
  const auto integrand = [&](double z) { return eval_weight(w, z) * pdf(f, z); };
  return integrate_between(integrand, -INFINITY, x, detail::weighted_breaks(f, w), opt);
}

/// E_F[w(X)].
inline double weighted_mass(const Parametric& f, const WeightFunction& w,
                            const QuadratureOptions& opt = {}) {
  return lower_weighted_mass(f, w, INFINITY, opt);
}

/// E_F[1{X > x} w(X)], computed directly so right-tail values keep precision.
inline double upper_weighted_mass(const Parametric& f, const WeightFunction& w, double x,
                                  const QuadratureOptions& opt = {}) {
  detail::require_univariate(w);
  if (x == INFINITY) return 0.0;
  const Normal* nf = std::get_if<Normal>(&f);
  const auto closed = std::visit(
      [&](const auto& c) -> std::optional<double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          return x == -INFINITY ? 1.0 : sf(f, x);
        } else if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          return sf(f, std::max(x, c.threshold));
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          return detail::prob_between(f, x, c.threshold);
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          return detail::prob_between(f, std::max(x, c.lower.at(0)), c.upper.at(0));
        } else if constexpr (std::is_same_v<T, weights::GaussPdf>) {
          if (!nf) return std::nullopt;
          detail::check_sigma(c.sigma);
          const auto g = detail::gauss_product(c.mu, c.sigma, *nf);
          return g.scale * special::Phi_c((x - g.centre) / g.spread);
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussPdfRatio>) {
          if (!nf) return std::nullopt;
          detail::check_sigma(c.sigma);
          const auto g = detail::gauss_product(c.mu, c.sigma, *nf);
          const double base = x == -INFINITY ? 1.0 : sf(f, x);
          return base - c.sigma * std::sqrt(2.0 * std::numbers::pi) * g.scale *
                            special::Phi_c((x - g.centre) / g.spread);
        } else {
          return std::nullopt;
        }
      },
      w);
  if (closed) return std::max(*closed, 0.0);
  const auto integrand = [&](double z) { return eval_weight(w, z) * pdf(f, z); };
  return integrate_between(integrand, x, INFINITY, detail::weighted_breaks(f, w), opt);
}

/// F_w(x) = E_F[1{X <= x} w(X)] / E_F[w(X)].
inline double weighted_cdf(const Parametric& f, const WeightFunction& w, double x,
                           const QuadratureOptions& opt = {}) {
  const double mass = weighted_mass(f, w, opt);
  if (!(mass > kWeightedMassFloor)) {
    throw WeightedMassZero("weighted_cdf: E_F[w(X)] = " + std::to_string(mass) +
                           " is below the floor; F_w is undefined");
  }
  return std::clamp(lower_weighted_mass(f, w, x, opt) / mass, 0.0, 1.0);
}

inline double weighted_cdf(const Forecast& f, const WeightFunction& w, double x,
                           const QuadratureOptions& opt = {}) {
  return weighted_cdf(as_parametric(f), w, x, opt);
}

}  // namespace wxverif
