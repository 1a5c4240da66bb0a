#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/rng.hpp"
#include "wxverif/core/special.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace wxverif {

// ---------------------------------------------------------------------------
// Parametric predictive distributions. Constructors enforce the invariants,
// so any instance that exists is a valid distribution.
// ---------------------------------------------------------------------------

class Normal {
 public:
  Normal(double mean, double variance) : mean_(mean), variance_(variance) {
    require(std::isfinite(mean), "Normal: mean must be finite");
    require(std::isfinite(variance) && variance > 0.0, "Normal: variance must be > 0");
    sd_ = std::sqrt(variance);
  }

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double sd() const { return sd_; }

  double cdf(double x) const { return special::Phi((x - mean_) / sd_); }
  double sf(double x) const { return special::Phi_c((x - mean_) / sd_); }
  double pdf(double x) const { return special::phi((x - mean_) / sd_) / sd_; }
  double quantile(double p) const { return mean_ + sd_ * special::Phi_inv(p); }

  friend bool operator==(const Normal&, const Normal&) = default;

 private:
  double mean_;
  double variance_;
  double sd_;
};

class Logistic {
 public:
  Logistic(double location, double scale) : location_(location), scale_(scale) {
    require(std::isfinite(location), "Logistic: location must be finite");
    require(std::isfinite(scale) && scale > 0.0, "Logistic: scale must be > 0");
  }

  double location() const { return location_; }
  double scale() const { return scale_; }
  double mean() const { return location_; }
  double variance() const { return scale_ * scale_ * std::numbers::pi * std::numbers::pi / 3.0; }

  double cdf(double x) const { return 1.0 / (1.0 + std::exp(-(x - location_) / scale_)); }
  double sf(double x) const { return 1.0 / (1.0 + std::exp((x - location_) / scale_)); }
  double pdf(double x) const {
    const double e = std::exp(-std::abs(x - location_) / scale_);
    return e / (scale_ * (1.0 + e) * (1.0 + e));
  }
  double quantile(double p) const {
    if (p <= 0.0) return -INFINITY;
    if (p >= 1.0) return INFINITY;
    return location_ + scale_ * std::log(p / (1.0 - p));
  }

  friend bool operator==(const Logistic&, const Logistic&) = default;

 private:
  double location_;
  double scale_;
};

/// Location-scale Student-t distribution.
class StudentT {
 public:
  StudentT(double df, double location, double scale)
      : df_(checked_df(df)), location_(location), scale_(scale), standard_(df_) {
    require(std::isfinite(location), "StudentT: location must be finite");
    require(std::isfinite(scale) && scale > 0.0, "StudentT: scale must be > 0");
  }

  // Runs before the boost distribution is built, so bad df reports as ours.
  static double checked_df(double df) {
    require(std::isfinite(df) && df > 0.0, "StudentT: degrees of freedom must be > 0");
    return df;
  }

  /// Location-scale t with the given mean and variance; needs df > 2.
  static StudentT moment_matched(double df, double mean, double variance) {
    require(df > 2.0, "StudentT: moment matching needs df > 2 (finite variance)");
    require(variance > 0.0, "StudentT: variance must be > 0");
    return StudentT(df, mean, std::sqrt(variance * (df - 2.0) / df));
  }

  double df() const { return df_; }
  double location() const { return location_; }
  double scale() const { return scale_; }
  double mean() const {
    return df_ > 1.0 ? location_ : std::numeric_limits<double>::quiet_NaN();
  }
  double variance() const {
    if (df_ <= 1.0) return std::numeric_limits<double>::quiet_NaN();
    if (df_ <= 2.0) return std::numeric_limits<double>::infinity();
    return scale_ * scale_ * df_ / (df_ - 2.0);
  }

  double cdf(double x) const { return boost::math::cdf(standard_, (x - location_) / scale_); }
  double sf(double x) const {
    return boost::math::cdf(boost::math::complement(standard_, (x - location_) / scale_));
  }
  double pdf(double x) const { return boost::math::pdf(standard_, (x - location_) / scale_) / scale_; }
  double quantile(double p) const {
    if (p <= 0.0) return -INFINITY;
    if (p >= 1.0) return INFINITY;
    return location_ + scale_ * boost::math::quantile(standard_, p);
  }

  friend bool operator==(const StudentT& a, const StudentT& b) {
    return a.df_ == b.df_ && a.location_ == b.location_ && a.scale_ == b.scale_;
  }

 private:
  double df_;
  double location_;
  double scale_;
  boost::math::students_t_distribution<double> standard_;
};

/// Finite set of equally weighted members.
class Ensemble {
 public:
  explicit Ensemble(std::vector<double> members) : members_(std::move(members)) {
    require(!members_.empty(), "Ensemble: needs at least one member");
    for (double x : members_) require(std::isfinite(x), "Ensemble: members must be finite");
  }

  std::span<const double> members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  /// Empirical CDF: fraction of members <= x.
  double cdf(double x) const {
    const auto n = std::count_if(members_.begin(), members_.end(), [x](double m) { return m <= x; });
    return static_cast<double>(n) / static_cast<double>(members_.size());
  }
  double sf(double x) const { return 1.0 - cdf(x); }

  double mean() const {
    double s = 0.0;
    for (double x : members_) s += x;
    return s / static_cast<double>(members_.size());
  }

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::vector<double> members_;
};

using Parametric = std::variant<Normal, Logistic, StudentT>;
using Forecast = std::variant<Ensemble, Normal, Logistic, StudentT>;

inline Forecast to_forecast(const Parametric& p) {
  return std::visit([](const auto& d) -> Forecast { return d; }, p);
}

inline bool is_ensemble(const Forecast& f) { return std::holds_alternative<Ensemble>(f); }

/// The parametric alternative held by f; ContractViolation for ensembles.
inline Parametric as_parametric(const Forecast& f) {
  return std::visit(
      [](const auto& d) -> Parametric {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Ensemble>) {
          throw ContractViolation("expected a parametric forecast, got an ensemble");
        } else {
          return d;
        }
      },
      f);
}

inline double cdf(const Parametric& f, double x) {
  return std::visit([x](const auto& d) { return d.cdf(x); }, f);
}
inline double sf(const Parametric& f, double x) {
  return std::visit([x](const auto& d) { return d.sf(x); }, f);
}
inline double pdf(const Parametric& f, double x) {
  return std::visit([x](const auto& d) { return d.pdf(x); }, f);
}
inline double quantile(const Parametric& f, double p) {
  return std::visit([p](const auto& d) { return d.quantile(p); }, f);
}
inline double mean(const Parametric& f) {
  return std::visit([](const auto& d) { return d.mean(); }, f);
}
inline double variance(const Parametric& f) {
  return std::visit([](const auto& d) { return d.variance(); }, f);
}

inline double cdf(const Forecast& f, double x) {
  return std::visit([x](const auto& d) { return d.cdf(x); }, f);
}

/// Points at which quadrature over a parametric forecast is split: a handful
/// of quantiles from the far tails to the centre.
inline std::vector<double> support_breaks(const Parametric& f) {
  static constexpr std::array<double, 7> kLevels = {1e-12, 1e-6, 0.02, 0.5, 0.98, 1.0 - 1e-6,
                                                    1.0 - 1e-12};
  std::vector<double> out;
  out.reserve(kLevels.size());
  if (const auto* n = std::get_if<Normal>(&f)) {
    // Quantiles of N(0,1) at kLevels.
    static constexpr std::array<double, 7> kZ = {-7.034483825, -4.753424309, -2.053748911, 0.0,
                                                 2.053748911,  4.753424309,  7.034483825};
    for (double z : kZ) out.push_back(n->mean() + n->sd() * z);
    return out;
  }
  for (double p : kLevels) out.push_back(quantile(f, p));
  return out;
}

inline std::string describe(const Forecast& f) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Ensemble>) {
          os << "Ensemble(m=" << d.size() << ")";
        } else if constexpr (std::is_same_v<T, Normal>) {
          os << "Normal(" << d.mean() << "," << d.variance() << ")";
        } else if constexpr (std::is_same_v<T, Logistic>) {
          os << "Logistic(" << d.location() << "," << d.scale() << ")";
        } else {
          os << "StudentT(" << d.df() << "," << d.location() << "," << d.scale() << ")";
        }
      },
      f);
  return os.str();
}

inline std::string describe(const Parametric& f) { return describe(to_forecast(f)); }

/// Draws one value from a parametric forecast by inversion, so the stream of
/// draws depends only on the generator's output words.
template <class URBG>
double sample(const Parametric& f, URBG& gen) {
  return quantile(f, uniform_open01(gen));
}

// ---------------------------------------------------------------------------
// Multivariate forecasts
// ---------------------------------------------------------------------------

/// d x m ensemble stored member-major: member j occupies values[j*d, (j+1)*d).
class MvEnsemble {
 public:
  MvEnsemble(std::size_t dims, std::size_t members, std::vector<double> member_major,
             std::vector<std::string> labels = {})
      : dims_(dims), members_(members), values_(std::move(member_major)), labels_(std::move(labels)) {
    require(dims_ >= 1, "MvEnsemble: needs d >= 1");
    require(members_ >= 1, "MvEnsemble: needs m >= 1");
    require(values_.size() == dims_ * members_, "MvEnsemble: value count must equal d*m");
    require(labels_.empty() || labels_.size() == dims_, "MvEnsemble: one label per dimension");
    for (double x : values_) require(std::isfinite(x), "MvEnsemble: entries must be finite");
  }

  /// Builds from a list of members, each a d-vector.
  static MvEnsemble from_members(const std::vector<std::vector<double>>& members) {
    require(!members.empty(), "MvEnsemble: needs m >= 1");
    const std::size_t d = members.front().size();
    std::vector<double> flat;
    flat.reserve(d * members.size());
    for (const auto& m : members) {
      require(m.size() == d, "MvEnsemble: members must share one dimension");
      flat.insert(flat.end(), m.begin(), m.end());
    }
    return MvEnsemble(d, members.size(), std::move(flat));
  }

  /// Builds from per-dimension rows (d rows of m values).
  static MvEnsemble from_rows(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), "MvEnsemble: needs d >= 1");
    const std::size_t m = rows.front().size();
    std::vector<double> flat(rows.size() * m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == m, "MvEnsemble: rows must share one member count");
      for (std::size_t j = 0; j < m; ++j) flat[j * rows.size() + i] = rows[i][j];
    }
    return MvEnsemble(rows.size(), m, std::move(flat));
  }

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::span<const double> member(std::size_t j) const {
    return std::span<const double>(values_).subspan(j * dims_, dims_);
  }
  double operator()(std::size_t dim, std::size_t member) const {
    return values_[member * dims_ + dim];
  }
  /// Values of one dimension across all members.
  std::vector<double> row(std::size_t dim) const {
    std::vector<double> out(members_);
    for (std::size_t j = 0; j < members_; ++j) out[j] = (*this)(dim, j);
    return out;
  }

  friend bool operator==(const MvEnsemble&, const MvEnsemble&) = default;

 private:
  std::size_t dims_;
  std::size_t members_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

/// Multivariate forecast with independent parametric marginals.
struct IndependentMarginals {
  std::vector<Parametric> marginals;

  std::size_t dims() const { return marginals.size(); }

  template <class URBG>
  void sample_into(URBG& gen, std::span<double> out) const {
    for (std::size_t i = 0; i < marginals.size(); ++i) out[i] = sample(marginals[i], gen);
  }
};

}  // namespace wxverif
