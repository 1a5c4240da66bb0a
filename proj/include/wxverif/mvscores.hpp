#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/weight.hpp"
#include "wxverif/core/weighted_cdf.hpp"
#include "wxverif/uniscores.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace wxverif {

/// Order p of the variogram and pair weights h (d x d, row-major; empty
/// means all ones). `reference` is the point x0 of the re-scaled variant
/// (empty means the origin).
struct VariogramSpec {
  double order = 0.5;
  std::vector<double> pair_weights{};
  std::vector<double> reference{};
};

namespace detail {

inline void check_dims(const MvEnsemble& ens, std::span<const double> y, const char* what) {
  if (y.size() != ens.dims()) {
    throw ContractViolation(std::string(what) + ": observation has dimension " + std::to_string(y.size()) +
                            ", ensemble has " + std::to_string(ens.dims()));
  }
  for (double v : y) require(std::isfinite(v), std::string(what) + ": observation must be finite");
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Sum over ordered member pairs of ||x_k - x_l|| w_k w_l.
inline double weighted_pair_norm_sum(const MvEnsemble& ens, std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    if (w[k] == 0.0) continue;
    for (std::size_t l = k + 1; l < ens.size(); ++l) {
      if (w[l] != 0.0) acc += w[k] * w[l] * euclid(ens.member(k), ens.member(l));
    }
  }
  return 2.0 * acc;
}

inline void check_variogram(const VariogramSpec& spec, std::size_t d) {
  require(std::isfinite(spec.order) && spec.order > 0.0, "variogram: order p must be > 0");
  if (!spec.pair_weights.empty()) {
    require(spec.pair_weights.size() == d * d, "variogram: pair weights must be d x d");
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double h = spec.pair_weights[i * d + j];
        require(h >= 0.0 && h <= 1.0, "variogram: pair weights must lie in [0, 1]");
        require(h == spec.pair_weights[j * d + i], "variogram: pair weights must be symmetric");
      }
    }
  }
}

inline double pair_weight(const VariogramSpec& spec, std::size_t d, std::size_t i, std::size_t j) {
  return spec.pair_weights.empty() ? 1.0 : spec.pair_weights[i * d + j];
}

inline double gamma(std::span<const double> x, std::size_t i, std::size_t j, double p) {
  return std::pow(std::abs(x[i] - x[j]), p);
}

// Weighted moments of gamma_ij over members: sum w, sum w g, sum w g^2.
struct GammaMoments {
  double w = 0.0, wg = 0.0, wgg = 0.0;
};

inline GammaMoments gamma_moments(const MvEnsemble& ens, std::span<const double> w, std::size_t i,
                                  std::size_t j, double p) {
  GammaMoments g;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const double v = gamma(ens.member(k), i, j, p);
    g.w += w[k];
    g.wg += w[k] * v;
    g.wgg += w[k] * v * v;
  }
  return g;
}

inline std::vector<double> member_weights(const MvEnsemble& ens, const WeightFunction& w) {
  std::vector<double> out(ens.size());
  for (std::size_t k = 0; k < ens.size(); ++k) out[k] = eval_weight(w, ens.member(k));
  return out;
}

inline MvEnsemble chain_members(const MvEnsemble& ens, const ChainingFunction& v) {
  std::vector<double> flat;
  flat.reserve(ens.dims() * ens.size());
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const auto t = eval_chaining(v, ens.member(k));
    flat.insert(flat.end(), t.begin(), t.end());
  }
  return MvEnsemble(ens.dims(), ens.size(), std::move(flat), ens.labels());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Energy score family
// ---------------------------------------------------------------------------

/// Mean ||x_k - y|| minus half the mean pairwise distance between members.
inline double energy_score(const MvEnsemble& ens, std::span<const double> y, EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "energy_score");
  double to_y = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) to_y += detail::euclid(ens.member(k), y);
  const std::vector<double> ones(ens.size(), 1.0);
  const double spread = detail::weighted_pair_norm_sum(ens, ones) / detail::spread_denominator(ens.size(), opt);
  return to_y / static_cast<double>(ens.size()) - 0.5 * spread;
}

/// Energy score of the chained members at v(y). v(y) is used in the first
/// term, so the identity chaining gives back the energy score.
inline double tw_energy_score(const MvEnsemble& ens, std::span<const double> y, const ChainingFunction& v,
                              EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "tw_energy_score");
  const auto vy = eval_chaining(v, y);
  return energy_score(detail::chain_members(ens, v), vy, opt);
}

/// w(y) times the energy score of the ensemble reweighted to w(x_k)/sum w.
inline double ow_energy_score(const MvEnsemble& ens, std::span<const double> y, const WeightFunction& w) {
  detail::check_dims(ens, y, "ow_energy_score");
  const double wy = eval_weight(w, y);
  if (wy == 0.0) return 0.0;
  const auto wx = detail::member_weights(ens, w);
  double mass = 0.0;
  for (double v : wx) mass += v;
  if (!(mass / static_cast<double>(ens.size()) > kWeightedMassFloor)) {
    throw WeightedMassZero("ow_energy_score: no ensemble member carries weight, F_w is undefined");
  }
  double to_y = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    if (wx[k] != 0.0) to_y += wx[k] * detail::euclid(ens.member(k), y);
  }
  const double spread = detail::weighted_pair_norm_sum(ens, wx);
  return wy * (to_y / mass - 0.5 * spread / (mass * mass));
}

/// E||X-y|| w(X)w(y) - 1/2 E||X-X'|| w(X)w(X') + (E||X-x0|| w(X) - ||y-x0|| w(y)) (E w(X) - w(y)).
inline double vr_energy_score(const MvEnsemble& ens, std::span<const double> y, const WeightFunction& w,
                              std::span<const double> x0, EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "vr_energy_score");
  detail::check_dims(ens, x0, "vr_energy_score (x0)");
  const auto wx = detail::member_weights(ens, w);
  const double wy = eval_weight(w, y);
  const double m = static_cast<double>(ens.size());
  double mass = 0.0, to_y = 0.0, to_ref = 0.0, self = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    if (wx[k] == 0.0) continue;
    const double r = detail::euclid(ens.member(k), x0);
    mass += wx[k];
    to_y += wx[k] * detail::euclid(ens.member(k), y);
    to_ref += wx[k] * r;
    self += wx[k] * wx[k] * r;
  }
  const double spread = detail::weighted_pair_norm_sum(ens, wx) / detail::spread_denominator(ens.size(), opt);
  const double ry = detail::euclid(y, x0) * wy;
  return to_y / m * wy - 0.5 * spread + detail::ensemble_cross_term(to_ref, mass, self, ens.size(), opt) -
         to_ref / m * wy - ry * mass / m + ry * wy;
}

// ---------------------------------------------------------------------------
// Variogram score family
//
// With gamma_ij(x) = |x_i - x_j|^p and the kernel
//   rho(a, b) = sum_ij h_ij (gamma_ij(a) - gamma_ij(b))^2,
// VS(F, y) = E rho(X, y) - 1/2 E rho(X, X'), which is the usual
// sum_ij h_ij (E gamma_ij(X) - gamma_ij(y))^2. The weighted variants apply
// the energy-score constructions to rho. Pair sums are reduced per (i, j)
// through  sum_kl w_k w_l (g_k - g_l)^2 = 2 (W sum w g^2 - (sum w g)^2).
// ---------------------------------------------------------------------------

/// sum_ij h_ij (mean_k |x_ki - x_kj|^p - |y_i - y_j|^p)^2. The fair option
/// uses the kernel form with an m(m-1) spread denominator.
inline double variogram_score(const MvEnsemble& ens, std::span<const double> y, const VariogramSpec& spec = {},
                              EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "variogram_score");
  const std::size_t d = ens.dims();
  detail::check_variogram(spec, d);
  const std::vector<double> ones(ens.size(), 1.0);
  const double m = static_cast<double>(ens.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      const double h = detail::pair_weight(spec, d, i, j);
      if (h == 0.0) continue;
      const auto g = detail::gamma_moments(ens, ones, i, j, spec.order);
      const double gy = detail::gamma(y, i, j, spec.order);
      if (!opt.fair) {
        const double diff = g.wg / m - gy;
        total += h * diff * diff;
      } else {
        const double to_y = (g.wgg - 2.0 * gy * g.wg + gy * gy * m) / m;
        const double spread = 2.0 * (m * g.wgg - g.wg * g.wg) / detail::spread_denominator(ens.size(), opt);
        total += h * (to_y - 0.5 * spread);
      }
    }
  }
  return total;
}

inline double tw_variogram_score(const MvEnsemble& ens, std::span<const double> y, const ChainingFunction& v,
                                 const VariogramSpec& spec = {}, EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "tw_variogram_score");
  const auto vy = eval_chaining(v, y);
  return variogram_score(detail::chain_members(ens, v), vy, spec, opt);
}

/// w(y) times the variogram score of the ensemble reweighted to w(x_k)/sum w.
inline double ow_variogram_score(const MvEnsemble& ens, std::span<const double> y, const WeightFunction& w,
                                 const VariogramSpec& spec = {}) {
  detail::check_dims(ens, y, "ow_variogram_score");
  const std::size_t d = ens.dims();
  detail::check_variogram(spec, d);
  const double wy = eval_weight(w, y);
  if (wy == 0.0) return 0.0;
  const auto wx = detail::member_weights(ens, w);
  double mass = 0.0;
  for (double v : wx) mass += v;
  if (!(mass / static_cast<double>(ens.size()) > kWeightedMassFloor)) {
    throw WeightedMassZero("ow_variogram_score: no ensemble member carries weight, F_w is undefined");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double h = detail::pair_weight(spec, d, i, j);
      if (i == j || h == 0.0) continue;
      const auto g = detail::gamma_moments(ens, wx, i, j, spec.order);
      const double diff = g.wg / mass - detail::gamma(y, i, j, spec.order);
      total += h * diff * diff;
    }
  }
  return wy * total;
}

/// Re-scaled variogram score: the vr_energy_score construction with the
/// variogram kernel rho and reference point spec.reference (default 0).
/// This completes the weighted variogram family; it is not a published
/// formula.
inline double vr_variogram_score(const MvEnsemble& ens, std::span<const double> y, const WeightFunction& w,
                                 const VariogramSpec& spec = {}, EnsembleOptions opt = {}) {
  detail::check_dims(ens, y, "vr_variogram_score");
  const std::size_t d = ens.dims();
  detail::check_variogram(spec, d);
  std::vector<double> x0 = spec.reference.empty() ? std::vector<double>(d, 0.0) : spec.reference;
  detail::check_dims(ens, x0, "vr_variogram_score (reference)");
  const auto wx = detail::member_weights(ens, w);
  const double wy = eval_weight(w, y);
  const double m = static_cast<double>(ens.size());
  const double denom = detail::spread_denominator(ens.size(), opt);
  double mass = 0.0;
  for (double v : wx) mass += v;
  double to_y = 0.0, spread = 0.0, to_ref = 0.0, y_to_ref = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double h = detail::pair_weight(spec, d, i, j);
      if (i == j || h == 0.0) continue;
      const auto g = detail::gamma_moments(ens, wx, i, j, spec.order);
      const double gy = detail::gamma(y, i, j, spec.order);
      const double gr = detail::gamma(x0, i, j, spec.order);
      to_y += h * (g.wgg - 2.0 * gy * g.wg + gy * gy * g.w);
      to_ref += h * (g.wgg - 2.0 * gr * g.wg + gr * gr * g.w);
      // k == l terms vanish, so this serves both spread denominators.
      spread += h * 2.0 * (g.w * g.wgg - g.wg * g.wg);
      y_to_ref += h * (gy - gr) * (gy - gr);
    }
  }
  double self = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    if (wx[k] == 0.0) continue;
    double r = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double h = detail::pair_weight(spec, d, i, j);
        if (i == j || h == 0.0) continue;
        const double diff = detail::gamma(ens.member(k), i, j, spec.order) - detail::gamma(x0, i, j, spec.order);
        r += h * diff * diff;
      }
    }
    self += wx[k] * wx[k] * r;
  }
  const double ry = y_to_ref * wy;
  return to_y / m * wy - 0.5 * spread / denom +
         detail::ensemble_cross_term(to_ref, mass, self, ens.size(), opt) - to_ref / m * wy - ry * mass / m +
         ry * wy;
}

}  // namespace wxverif
