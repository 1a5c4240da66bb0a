#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/special.hpp"
#include "wxverif/uniscores.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wxverif {

/// Predictive variances never go below this (degC^2).
inline constexpr double kVarianceFloor = 1e-6;

/// Temperature lapse rate, degC per metre.
inline constexpr double kLapseRate = 0.006;

/// A model surface above the station is too cold, so the difference in
/// height times the lapse rate is added.
inline double lapse_rate_correct(double value, double model_height, double true_height) {
  require(std::isfinite(model_height) && std::isfinite(true_height), "lapse_rate_correct: heights must be finite");
  return value + kLapseRate * (model_height - true_height);
}

struct StationMeta {
  std::string station_id;
  /// Topographic position index (m).
  double tpi = 0.0;
  /// Model height minus true height (m).
  double mhd = 0.0;
  double altitude = 0.0;
  double latitude = 0.0;

  friend bool operator==(const StationMeta&, const StationMeta&) = default;
};

// ---------------------------------------------------------------------------
// Mean/variance helpers
// ---------------------------------------------------------------------------

/// Welford running mean and (n-1) variance.
class RunningMoments {
 public:
  void push(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Normal(mean, sample variance) of the members, variance floored.
inline Normal smooth_ensemble(std::span<const double> members) {
  require(members.size() >= 2, "smooth_ensemble: needs at least two members");
  RunningMoments mom;
  for (double x : members) {
    require(std::isfinite(x), "smooth_ensemble: members must be finite");
    mom.push(x);
  }
  // The mean is the plain arithmetic mean, not Welford's running value.
  const double mean = std::accumulate(members.begin(), members.end(), 0.0) / static_cast<double>(members.size());
  return Normal(mean, std::max(mom.sample_variance(), kVarianceFloor));
}

/// Station climatology from its recent observations.
inline Normal fit_climatology(std::span<const double> history) {
  if (history.size() < 10) {
    throw InsufficientData("fit_climatology: needs at least 10 observations, got " + std::to_string(history.size()));
  }
  RunningMoments mom;
  for (double x : history) {
    require(std::isfinite(x), "fit_climatology: observations must be finite");
    mom.push(x);
  }
  return Normal(mom.mean(), std::max(mom.sample_variance(), kVarianceFloor));
}

// ---------------------------------------------------------------------------
// EMOS
//   Y ~ N(intercept + mean_slope*xbar + mhd_slope*MHD + tpi_slope*TPI,
//         var_intercept + var_slope*v)
// ---------------------------------------------------------------------------

struct EmosParams {
  double intercept = 0.0;
  double mean_slope = 1.0;
  double mhd_slope = 0.0;
  double tpi_slope = 0.0;
  double var_intercept = 1.0;
  double var_slope = 0.1;
  int lead_time = 0;

  friend bool operator==(const EmosParams&, const EmosParams&) = default;
};

inline Normal predict_emos(const EmosParams& p, double ens_mean, double ens_var, const StationMeta& meta) {
  const double var = p.var_intercept + p.var_slope * ens_var;
  require(std::isfinite(var) && var > 0.0, "predict_emos: predictive variance must be > 0");
  return Normal(p.intercept + p.mean_slope * ens_mean + p.mhd_slope * meta.mhd + p.tpi_slope * meta.tpi, var);
}

struct TrainingCase {
  double ens_mean = 0.0;
  double ens_var = 0.0;
  double mhd = 0.0;
  double tpi = 0.0;
  double obs = 0.0;
};

/// The most recent `capacity` forecast days, each holding the cases of all
/// stations for that day.
class TrainingWindow {
 public:
  explicit TrainingWindow(std::size_t capacity = 45) : capacity_(capacity) {
    require(capacity_ >= 1, "TrainingWindow: capacity must be >= 1");
  }

  /// Appends a day; days must arrive in increasing order.
  void push_day(std::int64_t day, std::vector<TrainingCase> cases) {
    require(days_.empty() || day > days_.back().first, "TrainingWindow: days must be pushed in chronological order");
    days_.emplace_back(day, std::move(cases));
    while (days_.size() > capacity_) days_.pop_front();
  }

  std::size_t days() const { return days_.size(); }
  std::size_t capacity() const { return capacity_; }

  std::vector<TrainingCase> cases() const {
    std::vector<TrainingCase> out;
    for (const auto& d : days_) out.insert(out.end(), d.second.begin(), d.second.end());
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<std::pair<std::int64_t, std::vector<TrainingCase>>> days_;
};

struct EmosFitOptions {
  double gradient_tol = 1e-6;
  std::size_t max_iterations = 500;
};

struct EmosFit {
  EmosParams params;
  bool converged = false;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  /// Objective (mean CRPS) before the first and after every iteration.
  std::vector<double> objective_trace;
};

namespace detail {

// Internal coordinates: coefficients on centred/scaled predictors and logs
// of the two variance terms (var_intercept = floor + exp(.)).
class EmosObjective {
 public:
  static constexpr std::size_t kDim = 6;
  using Vec = std::array<double, kDim>;

  explicit EmosObjective(std::span<const TrainingCase> data) : data_(data) {
    for (std::size_t k = 0; k < 3; ++k) {
      RunningMoments mom;
      for (const auto& c : data_) mom.push(predictor(c, k));
      centre_[k] = mom.mean();
      const double sd = std::sqrt(mom.sample_variance());
      scale_[k] = sd > 1e-12 * std::max(1.0, std::abs(centre_[k])) ? sd : 0.0;
    }
  }

  Vec to_internal(const EmosParams& p) const {
    const std::array<double, 3> slope{p.mean_slope, p.mhd_slope, p.tpi_slope};
    Vec th{};
    th[0] = p.intercept;
    for (std::size_t k = 0; k < 3; ++k) {
      th[0] += slope[k] * centre_[k];
      th[k + 1] = scale_[k] > 0.0 ? slope[k] * scale_[k] : slope[k];
    }
    th[4] = std::log(std::max(p.var_intercept - kVarianceFloor, 1e-300));
    th[5] = std::log(std::max(p.var_slope, 1e-300));
    return th;
  }

  EmosParams to_params(const Vec& th) const {
    EmosParams p;
    std::array<double, 3> slope{};
    p.intercept = th[0];
    for (std::size_t k = 0; k < 3; ++k) {
      slope[k] = scale_[k] > 0.0 ? th[k + 1] / scale_[k] : th[k + 1];
      p.intercept -= slope[k] * centre_[k];
    }
    p.mean_slope = slope[0];
    p.mhd_slope = slope[1];
    p.tpi_slope = slope[2];
    p.var_intercept = kVarianceFloor + std::exp(th[4]);
    p.var_slope = std::exp(th[5]);
    return p;
  }

  /// Mean CRPS and its gradient in internal coordinates.
  double value(const Vec& th, Vec* grad) const {
    double total = 0.0;
    Vec g{};
    const double e0 = std::exp(th[4]);
    const double e1 = std::exp(th[5]);
    for (const auto& c : data_) {
      std::array<double, 4> z{1.0, 0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < 3; ++k) z[k + 1] = scaled(c, k);
      double mu = 0.0;
      for (std::size_t k = 0; k < 4; ++k) mu += th[k] * z[k];
      const double var = kVarianceFloor + e0 + e1 * c.ens_var;
      const double sd = std::sqrt(var);
      const double r = (c.obs - mu) / sd;
      const double cdf_r = special::Phi(r);
      const double pdf_r = special::phi(r);
      total += sd * (r * (2.0 * cdf_r - 1.0) + 2.0 * pdf_r - special::kInvSqrtPi);
      if (grad) {
        const double d_mu = -(2.0 * cdf_r - 1.0);
        const double d_var = (2.0 * pdf_r - special::kInvSqrtPi) / (2.0 * sd);
        for (std::size_t k = 0; k < 4; ++k) g[k] += d_mu * z[k];
        g[4] += d_var * e0;
        g[5] += d_var * e1 * c.ens_var;
      }
    }
    const double n = static_cast<double>(data_.size());
    if (grad) {
      for (auto& v : g) v /= n;
      *grad = g;
    }
    return total / n;
  }

 private:
  static double predictor(const TrainingCase& c, std::size_t k) {
    return k == 0 ? c.ens_mean : (k == 1 ? c.mhd : c.tpi);
  }
  double scaled(const TrainingCase& c, std::size_t k) const {
    const double x = predictor(c, k) - centre_[k];
    return scale_[k] > 0.0 ? x / scale_[k] : x;
  }

  std::span<const TrainingCase> data_;
  std::array<double, 3> centre_{};
  std::array<double, 3> scale_{};
};

inline double norm2(const EmosObjective::Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Minimises the mean CRPS over the training cases with BFGS and a
/// backtracking Armijo line search. Every accepted step lowers the
/// objective. `converged` is false when the iteration cap is hit first; the
/// best parameters found are returned either way.
inline EmosFit fit_emos(std::span<const TrainingCase> data, const std::optional<EmosParams>& init = std::nullopt,
                        const EmosFitOptions& opt = {}) {
  if (data.size() < 10) {
    throw InsufficientData("fit_emos: needs at least 10 training cases, got " + std::to_string(data.size()));
  }
  for (const auto& c : data) {
    require(std::isfinite(c.ens_mean) && std::isfinite(c.ens_var) && std::isfinite(c.obs) && std::isfinite(c.mhd) &&
                std::isfinite(c.tpi) && c.ens_var >= 0.0,
            "fit_emos: training cases must be finite with non-negative ensemble variance");
  }
  using Vec = detail::EmosObjective::Vec;
  constexpr std::size_t n = detail::EmosObjective::kDim;
  const detail::EmosObjective obj(data);

  EmosParams start = init.value_or(EmosParams{});
  start.var_intercept = std::max(start.var_intercept, 2.0 * kVarianceFloor);
  start.var_slope = std::max(start.var_slope, 1e-8);
  Vec x = obj.to_internal(start);
  Vec g{};
  double f = obj.value(x, &g);

  EmosFit out;
  out.objective_trace.push_back(f);
  std::array<Vec, n> h{};  // inverse Hessian approximation
  const auto reset = [&h] {
    for (std::size_t i = 0; i < n; ++i) {
      h[i].fill(0.0);
      h[i][i] = 1.0;
    }
  };
  reset();

  std::size_t it = 0;
  double gnorm = detail::norm2(g);
  while (gnorm >= opt.gradient_tol && it < opt.max_iterations) {
    Vec dir{};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dir[i] -= h[i][j] * g[j];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
    if (!(slope < 0.0)) {
      reset();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = -gnorm * gnorm;
    }
    double step = 1.0;
    Vec xn{}, gn{};
    double fn = f;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * dir[i];
      fn = obj.value(xn, &gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope && fn < f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no further decrease representable
    ++it;
    Vec s{}, yv{};
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      yv[i] = gn[i] - g[i];
      sy += s[i] * yv[i];
    }
    if (sy > 1e-14) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      Vec hy{};
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += h[i][j] * yv[j];
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
      }
    } else {
      reset();
    }
    x = xn;
    g = gn;
    f = fn;
    gnorm = detail::norm2(g);
    out.objective_trace.push_back(f);
  }
  out.params = obj.to_params(x);
  out.iterations = it;
  out.gradient_norm = gnorm;
  out.converged = gnorm < opt.gradient_tol;
  return out;
}

/// Mean CRPS of the EMOS predictive distributions over the cases.
inline double emos_mean_crps(const EmosParams& p, std::span<const TrainingCase> data) {
  double total = 0.0;
  for (const auto& c : data) {
    StationMeta meta;
    meta.mhd = c.mhd;
    meta.tpi = c.tpi;
    const Normal f = predict_emos(p, c.ens_mean, c.ens_var, meta);
    total += crps_normal(f.mean(), f.sd(), c.obs);
  }
  return total / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Ensemble copula coupling
// ---------------------------------------------------------------------------

/// Levels (i - 0.5)/m, i = 1..m.
inline std::vector<double> ecc_levels(std::size_t m) {
  require(m >= 1, "ecc_levels: m must be >= 1");
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  return out;
}

/// Rank (0-based) of every member within one dimension; ties go to the
/// lower member index first.
inline std::vector<std::size_t> member_ranks(const MvEnsemble& ens, std::size_t dim) {
  std::vector<std::size_t> order(ens.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ens(dim, a) < ens(dim, b); });
  std::vector<std::size_t> rank(ens.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

/// Draws the m evenly spaced quantiles of every marginal and arranges them
/// so each dimension has the rank order of the raw ensemble.
inline MvEnsemble ecc_reorder(std::span<const Parametric> marginals, const MvEnsemble& raw) {
  if (marginals.size() != raw.dims()) {
    throw ContractViolation("ecc_reorder: " + std::to_string(marginals.size()) + " marginals for a " +
                            std::to_string(raw.dims()) + "-dimensional ensemble");
  }
  const std::size_t d = raw.dims();
  const std::size_t m = raw.size();
  const auto levels = ecc_levels(m);
  std::vector<double> flat(d * m);
  for (std::size_t i = 0; i < d; ++i) {
    const auto r = member_ranks(raw, i);
    for (std::size_t k = 0; k < m; ++k) flat[k * d + i] = quantile(marginals[i], levels[r[k]]);
  }
  return MvEnsemble(d, m, std::move(flat), raw.labels());
}

}  // namespace wxverif
