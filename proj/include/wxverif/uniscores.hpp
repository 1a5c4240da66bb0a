#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/quadrature.hpp"
#include "wxverif/core/special.hpp"
#include "wxverif/core/weight.hpp"
#include "wxverif/core/weighted_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace wxverif {

/// Ensemble kernel scores divide the spread term by m^2 unless `fair`, which
/// uses m(m-1) and needs m >= 2.
struct EnsembleOptions {
  bool fair = false;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

namespace detail {

inline double spread_denominator(std::size_t m, EnsembleOptions opt) {
  const double md = static_cast<double>(m);
  if (!opt.fair) return md * md;
  require(m >= 2, "fair ensemble scores need at least two members");
  return md * (md - 1.0);
}

// Sum over ordered pairs of |x_i - x_j| * w_i * w_j, in O(m log m).
inline double weighted_pair_sum(std::span<const double> x, std::span<const double> w) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double wsum = 0.0;
  double wxsum = 0.0;
  double acc = 0.0;
  for (std::size_t k : idx) {
    acc += w[k] * (x[k] * wsum - wxsum);
    wsum += w[k];
    wxsum += w[k] * x[k];
  }
  return 2.0 * acc;
}

// Sum over ordered pairs of |x_i - x_j|.
inline double pair_sum(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (2.0 * static_cast<double>(i) - m + 1.0) * x[i];
  return 2.0 * acc;
}

// E[r(X) w(X)] E[w(X')] over members; with the fair option the k == l
// terms (sum_k r_k w_k^2, passed as `self`) are dropped.
inline double ensemble_cross_term(double to_ref, double mass, double self, std::size_t m, EnsembleOptions opt) {
  const double md = static_cast<double>(m);
  return opt.fair ? (to_ref * mass - self) / spread_denominator(m, opt) : to_ref * mass / (md * md);
}

inline double kernel_score_1d(std::vector<double> x, double y, EnsembleOptions opt) {
  require(!x.empty(), "ensemble score: needs at least one member");
  double abs_sum = 0.0;
  for (double v : x) abs_sum += std::abs(v - y);
  const double m = static_cast<double>(x.size());
  const double denom = spread_denominator(x.size(), opt);
  return abs_sum / m - 0.5 * pair_sum(std::move(x)) / denom;
}

// For each y in ys returns the integral of `lower` over (-inf, y] plus the
// integral of `upper` over [y, inf). The real line is cut at every y and
// every break, so a whole batch costs one pass of small quadratures.
template <class Lower, class Upper>
std::vector<double> split_integral(const Lower& lower, const Upper& upper,
                                   std::span<const double> ys, std::vector<double> breaks,
                                   const QuadratureOptions& opt) {
  for (double y : ys) require(std::isfinite(y), "score: observation must be finite");
  std::erase_if(breaks, [](double b) { return !std::isfinite(b); });
  std::vector<double> pts(breaks);
  pts.insert(pts.end(), ys.begin(), ys.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();

  // below[i] = integral of lower over (-inf, pts[i]]; above[i] over [pts[i], inf).
  std::vector<double> below(n), above(n);
  below[0] = integrate_piece(lower, -INFINITY, pts[0], opt);
  for (std::size_t i = 1; i < n; ++i) below[i] = below[i - 1] + integrate_short_piece(lower, pts[i - 1], pts[i], opt);
  above[n - 1] = integrate_piece(upper, pts[n - 1], INFINITY, opt);
  for (std::size_t i = n - 1; i-- > 0;) above[i] = above[i + 1] + integrate_short_piece(upper, pts[i], pts[i + 1], opt);

  std::vector<double> out(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), ys[k]) - pts.begin());
    out[k] = below[i] + above[i];
  }
  return out;
}

inline double log_logistic_cdf(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Brier score and CRPS
// ---------------------------------------------------------------------------

/// (F(t) - 1{y <= t})^2 with F(t) the ensemble fraction <= t or the CDF.
inline double brier(const Forecast& f, double y, double t) {
  const double p = cdf(f, t);
  const double o = y <= t ? 1.0 : 0.0;
  return (p - o) * (p - o);
}

inline double crps_ensemble(std::span<const double> members, double y, EnsembleOptions opt = {}) {
  require(!members.empty(), "crps_ensemble: needs at least one member");
  return detail::kernel_score_1d({members.begin(), members.end()}, y, opt);
}

inline double crps_normal(double mu, double sigma, double y) {
  require(std::isfinite(sigma) && sigma > 0.0, "crps_normal: sigma must be > 0");
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * special::Phi(z) - 1.0) + 2.0 * special::phi(z) - special::kInvSqrtPi);
}

inline double crps_logistic(double location, double scale, double y) {
  require(std::isfinite(scale) && scale > 0.0, "crps_logistic: scale must be > 0");
  const double z = (y - location) / scale;
  return scale * (z - 2.0 * detail::log_logistic_cdf(z) - 1.0);
}

/// Needs df > 1 (finite mean).
inline double crps_student_t(double df, double location, double scale, double y) {
  require(df > 1.0, "crps_student_t: needs df > 1");
  require(std::isfinite(scale) && scale > 0.0, "crps_student_t: scale must be > 0");
  const StudentT std_t(df, 0.0, 1.0);
  const double z = (y - location) / scale;
  const double spread = 2.0 * std::sqrt(df) *
                        std::exp(detail::log_beta(0.5, df - 0.5) - 2.0 * detail::log_beta(0.5, 0.5 * df)) /
                        (df - 1.0);
  return scale * (z * (2.0 * std_t.cdf(z) - 1.0) + 2.0 * std_t.pdf(z) * (df + z * z) / (df - 1.0) - spread);
}

/// Closed form for every forecast kind.
inline double crps(const Forecast& f, double y) {
  return std::visit(
      [y](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Ensemble>) {
          return crps_ensemble(d.members(), y);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return crps_normal(d.mean(), d.sd(), y);
        } else if constexpr (std::is_same_v<T, Logistic>) {
          return crps_logistic(d.location(), d.scale(), y);
        } else {
          return crps_student_t(d.df(), d.location(), d.scale(), y);
        }
      },
      f);
}

namespace detail {

inline void require_finite_mean(const Parametric& f) {
  if (const auto* t = std::get_if<StudentT>(&f)) {
    require(t->df() > 1.0, "CRPS-type scores need a finite forecast mean (StudentT df > 1)");
  }
}

}  // namespace detail

/// Integral of (F(z) - 1{y <= z})^2 by adaptive quadrature, for a batch of
/// observations.
inline std::vector<double> crps_numeric_many(const Parametric& f, std::span<const double> ys,
                                             const QuadratureOptions& opt = {}) {
  detail::require_finite_mean(f);
  const auto lower = [&](double z) { const double p = cdf(f, z); return p * p; };
  const auto upper = [&](double z) { const double q = sf(f, z); return q * q; };
  return detail::split_integral(lower, upper, ys, support_breaks(f), opt);
}

/// Integral form of the CRPS. Ensembles are integrated exactly piecewise.
inline double crps_numeric(const Forecast& f, double y, const QuadratureOptions& opt = {}) {
  if (const auto* e = std::get_if<Ensemble>(&f)) {
    const auto lower = [e](double z) { const double p = e->cdf(z); return p * p; };
    const auto upper = [e](double z) { const double q = 1.0 - e->cdf(z); return q * q; };
    std::vector<double> breaks(e->members().begin(), e->members().end());
    return detail::split_integral(lower, upper, std::span<const double>(&y, 1), std::move(breaks), opt)[0];
  }
  return crps_numeric_many(as_parametric(f), std::span<const double>(&y, 1), opt)[0];
}

// ---------------------------------------------------------------------------
// Threshold-weighted CRPS
// ---------------------------------------------------------------------------

/// Integral of (F(z) - 1{y <= z})^2 w(z) for an arbitrary CDF/survival pair.
/// `breaks` must list every kink of F and w.
template <class Cdf, class Sf, class Weight>
double threshold_weighted_integral(const Cdf& cdf_fn, const Sf& sf_fn, const Weight& weight_fn,
                                   double y, std::vector<double> breaks,
                                   const QuadratureOptions& opt = {}) {
  const auto lower = [&](double z) { const double p = cdf_fn(z); return p * p * weight_fn(z); };
  const auto upper = [&](double z) { const double q = sf_fn(z); return q * q * weight_fn(z); };
  return detail::split_integral(lower, upper, std::span<const double>(&y, 1), std::move(breaks), opt)[0];
}

/// twCRPS of an ensemble: the kernel score of the chained members at v(y).
inline double twcrps_ensemble(std::span<const double> members, double y, const ChainingFunction& v,
                              EnsembleOptions opt = {}) {
  require(!members.empty(), "twcrps: needs at least one member");
  std::vector<double> x(members.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = eval_chaining(v, members[i]);
  return detail::kernel_score_1d(std::move(x), eval_chaining(v, y), opt);
}

inline std::vector<double> vrcrps_many(const Parametric& f, std::span<const double> ys,
                                       const WeightFunction& w, double x0,
                                       const QuadratureOptions& opt);

/// twCRPS of a parametric forecast for a batch of observations, from the
/// integral of Brier scores weighted by w = v'. A univariate CollapseOutside
/// chaining has no derivative weight; it equals vrCRPS with x0 = z0.
inline std::vector<double> twcrps_many(const Parametric& f, std::span<const double> ys,
                                       const ChainingFunction& v, const QuadratureOptions& opt = {}) {
  detail::require_finite_mean(f);
  if (const auto* c = std::get_if<chainings::CollapseOutside>(&v)) {
    require(c->z0.size() == 1, "twcrps: univariate CollapseOutside needs a scalar z0");
    require(is_binary(c->weight), "CollapseOutside: weight must be {0,1}-valued");
    return vrcrps_many(f, ys, c->weight, c->z0[0], opt);
  }
  const WeightFunction w = *chaining_weight(v);
  const auto lower = [&](double z) { const double p = cdf(f, z); return p * p * eval_weight(w, z); };
  const auto upper = [&](double z) { const double q = sf(f, z); return q * q * eval_weight(w, z); };
  return detail::split_integral(lower, upper, ys, detail::weighted_breaks(f, w), opt);
}

inline double twcrps(const Forecast& f, double y, const ChainingFunction& v,
                     const QuadratureOptions& opt = {}, EnsembleOptions ens = {}) {
  if (const auto* e = std::get_if<Ensemble>(&f)) return twcrps_ensemble(e->members(), y, v, ens);
  return twcrps_many(as_parametric(f), std::span<const double>(&y, 1), v, opt)[0];
}

// ---------------------------------------------------------------------------
// Outcome-weighted CRPS
// ---------------------------------------------------------------------------

namespace detail {

inline double checked_mass(const Parametric& f, const WeightFunction& w, const QuadratureOptions& opt) {
  const double mass = weighted_mass(f, w, opt);
  if (!(mass > kWeightedMassFloor)) {
    throw WeightedMassZero("owCRPS: E_F[w(X)] = " + std::to_string(mass) +
                           " is below the floor, so the weighted forecast F_w is undefined");
  }
  return mass;
}

inline void refuse_ensemble(const Forecast& f, const char* score) {
  if (is_ensemble(f)) {
    throw Unsupported(std::string(score) +
                      " needs a continuous forecast; smooth the ensemble first "
                      "(smooth_ensemble, or --smooth on the command line)");
  }
}

}  // namespace detail

/// CRPS(F_w, y) for a batch of observations, without the w(y) factor.
inline std::vector<double> crps_of_weighted_many(const Parametric& f, std::span<const double> ys,
                                                 const WeightFunction& w,
                                                 const QuadratureOptions& opt = {}) {
  const double mass = detail::checked_mass(f, w, opt);
  const auto lower = [&](double z) { const double p = lower_weighted_mass(f, w, z, opt) / mass; return p * p; };
  const auto upper = [&](double z) { const double q = upper_weighted_mass(f, w, z, opt) / mass; return q * q; };
  return detail::split_integral(lower, upper, ys, detail::weighted_breaks(f, w), opt);
}

/// w(y) * CRPS(F_w, y); zero whenever w(y) = 0, without touching F_w.
inline double owcrps(const Forecast& f, double y, const WeightFunction& w,
                     const QuadratureOptions& opt = {}) {
  detail::refuse_ensemble(f, "owCRPS");
  const double wy = eval_weight(w, y);
  if (wy == 0.0) return 0.0;
  const auto p = as_parametric(f);
  detail::require_finite_mean(p);
  return wy * crps_of_weighted_many(p, std::span<const double>(&y, 1), w, opt)[0];
}

/// owCRPS with w = 1{z > t} plus the Brier score at t, for every outcome. Gating the
/// Brier term to y <= t would reward pushing F(t) towards one.
inline std::vector<double> owcrps_bs_many(const Parametric& f, std::span<const double> ys, double t,
                                          const QuadratureOptions& opt = {}) {
  detail::require_finite_mean(f);
  std::vector<double> out(ys.size());
  std::vector<double> above;
  std::vector<std::size_t> where;
  const Forecast ff = to_forecast(f);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    out[k] = brier(ff, ys[k], t);
    if (ys[k] > t) {
      above.push_back(ys[k]);
      where.push_back(k);
    }
  }
  if (!above.empty()) {
    const auto s = crps_of_weighted_many(f, above, weights::IndicatorAbove{t}, opt);
    for (std::size_t i = 0; i < where.size(); ++i) out[where[i]] += s[i];
  }
  return out;
}

inline double owcrps_bs(const Forecast& f, double y, double t, const QuadratureOptions& opt = {}) {
  detail::refuse_ensemble(f, "owCRPS+BS");
  return owcrps_bs_many(as_parametric(f), std::span<const double>(&y, 1), t, opt)[0];
}

// ---------------------------------------------------------------------------
// Vertically re-scaled CRPS
// ---------------------------------------------------------------------------

/// vrCRPS of an ensemble; the expectations are member averages.
inline double vrcrps_ensemble(std::span<const double> members, double y, const WeightFunction& w,
                              double x0 = 0.0, EnsembleOptions opt = {}) {
  require(!members.empty(), "vrcrps: needs at least one member");
  const double m = static_cast<double>(members.size());
  std::vector<double> wx(members.size());
  double mass = 0.0;
  double to_y = 0.0;
  double to_ref = 0.0;
  double self = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    wx[i] = eval_weight(w, members[i]);
    mass += wx[i];
    to_y += std::abs(members[i] - y) * wx[i];
    to_ref += std::abs(members[i] - x0) * wx[i];
    self += std::abs(members[i] - x0) * wx[i] * wx[i];
  }
  const double wy = eval_weight(w, y);
  const double spread = detail::weighted_pair_sum(members, wx) / detail::spread_denominator(members.size(), opt);
  const double ry = std::abs(y - x0) * wy;
  return to_y / m * wy - 0.5 * spread + detail::ensemble_cross_term(to_ref, mass, self, members.size(), opt) -
         to_ref / m * wy - ry * mass / m + ry * wy;
}

/// y-independent parts of vrCRPS for a parametric forecast:
///   mass      = E[w(X)]
///   spread    = E|X - X'| w(X) w(X')
///   to_ref    = E|X - x0| w(X)
/// With L(z), U(z) the weighted mass below/above z, E|X - a| w(X) is the
/// integral of L below a plus the integral of U above a, and
/// spread = 2 * integral of L*U.
class VrCrps {
 public:
  VrCrps(Parametric f, WeightFunction w, double x0 = 0.0, QuadratureOptions opt = {})
      : f_(std::move(f)), w_(std::move(w)), x0_(x0), opt_(opt) {
    detail::require_finite_mean(f_);
    require(std::isfinite(x0_), "vrcrps: x0 must be finite");
    breaks_ = detail::weighted_breaks(f_, w_);
    mass_ = weighted_mass(f_, w_, opt_);
    spread_ = 2.0 * integrate_real_line(
                        [this](double z) { return lower(z) * upper(z); }, breaks_, opt_);
    to_ref_ = abs_moment(std::span<const double>(&x0_, 1))[0];
  }

  double mass() const { return mass_; }
  double spread() const { return spread_; }

  std::vector<double> operator()(std::span<const double> ys) const {
    const auto to_y = abs_moment(ys);
    std::vector<double> out(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double wy = eval_weight(w_, ys[k]);
      out[k] = to_y[k] * wy - 0.5 * spread_ + (to_ref_ - std::abs(ys[k] - x0_) * wy) * (mass_ - wy);
    }
    return out;
  }

  double operator()(double y) const { return (*this)(std::span<const double>(&y, 1))[0]; }

 private:
  double lower(double z) const { return lower_weighted_mass(f_, w_, z, opt_); }
  double upper(double z) const { return upper_weighted_mass(f_, w_, z, opt_); }

  std::vector<double> abs_moment(std::span<const double> at) const {
    return detail::split_integral([this](double z) { return lower(z); },
                                  [this](double z) { return upper(z); }, at, breaks_, opt_);
  }

  Parametric f_;
  WeightFunction w_;
  double x0_;
  QuadratureOptions opt_;
  std::vector<double> breaks_;
  double mass_ = 0.0;
  double spread_ = 0.0;
  double to_ref_ = 0.0;
};

inline std::vector<double> vrcrps_many(const Parametric& f, std::span<const double> ys,
                                       const WeightFunction& w, double x0,
                                       const QuadratureOptions& opt) {
  return VrCrps(f, w, x0, opt)(ys);
}

inline double vrcrps(const Forecast& f, double y, const WeightFunction& w, double x0 = 0.0,
                     const QuadratureOptions& opt = {}, EnsembleOptions ens = {}) {
  if (const auto* e = std::get_if<Ensemble>(&f)) return vrcrps_ensemble(e->members(), y, w, x0, ens);
  return VrCrps(as_parametric(f), w, x0, opt)(y);
}

// ---------------------------------------------------------------------------
// twCRPS in terms of owCRPS, for w = 1{z > t}
// ---------------------------------------------------------------------------

/// twCRPS minus its decomposition into (1 - F(t))^2 owCRPS plus the
/// remainder terms; every piece is computed independently by quadrature.
inline double twcrps_decomposition_check(const Parametric& f, double y, double t,
                                         const QuadratureOptions& opt = {}) {
  const double ft = cdf(f, t);
  const double st = sf(f, t);
  require(st > 0.0, "twcrps_decomposition_check: needs F(t) < 1");
  const Forecast ff = to_forecast(f);
  const double tw = twcrps(ff, y, chainings::CensorAbove{t}, opt);
  const double ow = owcrps(ff, y, weights::IndicatorAbove{t}, opt);
  const auto breaks = support_breaks(f);
  double rest = 0.0;
  if (y > t) {
    const double excess = integrate_between([&](double x) { return st - sf(f, x); }, t, y, breaks, opt);
    rest = ft * ft * (y - t) + 2.0 * ft * excess;
  } else {
    rest = integrate_between([&](double x) { const double q = sf(f, x); return q * q; }, t, INFINITY,
                             breaks, opt);
  }
  return tw - (st * st * ow + rest);
}

}  // namespace wxverif
