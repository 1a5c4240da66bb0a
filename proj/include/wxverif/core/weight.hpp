#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/heat_level.hpp"
#include "wxverif/core/special.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <sstream>
#include <variant>
#include <vector>

namespace wxverif {

// ---------------------------------------------------------------------------
// Weight functions. Univariate Gaussian families take (mu, sigma) with sigma
// the standard deviation; multivariate ones take mean and diagonal variances.
// ---------------------------------------------------------------------------

namespace weights {

struct Constant {};
/// 1{z > t}
struct IndicatorAbove {
  double threshold;
};
/// 1{z < t}
struct IndicatorBelow {
  double threshold;
};
/// Central values: the N(mu, sigma^2) density.
struct GaussPdf {
  double mu;
  double sigma;
};
/// Tail values: 1 - phi(z) / phi(mu).
struct OneMinusGaussPdfRatio {
  double mu;
  double sigma;
};
/// Right tail: the N(mu, sigma^2) CDF.
struct GaussCdf {
  double mu;
  double sigma;
};
/// Left tail.
struct OneMinusGaussCdf {
  double mu;
  double sigma;
};
struct MvGaussPdf {
  std::vector<double> mu;
  std::vector<double> var;
};
struct OneMinusMvGaussPdfRatio {
  std::vector<double> mu;
  std::vector<double> var;
};
/// Upper right quadrant: product of marginal CDFs (diagonal covariance).
struct MvGaussCdf {
  std::vector<double> mu;
  std::vector<double> var;
};
struct OneMinusMvGaussCdf {
  std::vector<double> mu;
  std::vector<double> var;
};
/// 1{lower_i < z_i <= upper_i for all i}; bounds may be infinite.
struct BoxIndicator {
  std::vector<double> lower;
  std::vector<double> upper;
};
/// 1{classify_heat_level(z) == level} on three daily means.
struct HeatLevelIndicator {
  HeatLevel level;
  HeatThresholds thresholds{};
};

}  // namespace weights

using WeightFunction =
    std::variant<weights::Constant, weights::IndicatorAbove, weights::IndicatorBelow,
                 weights::GaussPdf, weights::OneMinusGaussPdfRatio, weights::GaussCdf,
                 weights::OneMinusGaussCdf, weights::MvGaussPdf, weights::OneMinusMvGaussPdfRatio,
                 weights::MvGaussCdf, weights::OneMinusMvGaussCdf, weights::BoxIndicator,
                 weights::HeatLevelIndicator>;

namespace detail {

template <class T>
inline constexpr bool is_univariate_gauss_v =
    std::is_same_v<T, weights::GaussPdf> || std::is_same_v<T, weights::OneMinusGaussPdfRatio> ||
    std::is_same_v<T, weights::GaussCdf> || std::is_same_v<T, weights::OneMinusGaussCdf>;

template <class T>
inline constexpr bool is_mv_gauss_v =
    std::is_same_v<T, weights::MvGaussPdf> || std::is_same_v<T, weights::OneMinusMvGaussPdfRatio> ||
    std::is_same_v<T, weights::MvGaussCdf> || std::is_same_v<T, weights::OneMinusMvGaussCdf>;

inline void check_sigma(double sigma) {
  require(std::isfinite(sigma) && sigma > 0.0, "weight: sigma must be finite and > 0");
}

inline void check_mv(const std::vector<double>& mu, const std::vector<double>& var) {
  require(!mu.empty() && mu.size() == var.size(), "weight: mean and variance sizes differ");
  for (double v : var) require(std::isfinite(v) && v > 0.0, "weight: diagonal variances must be > 0");
}

// Product of marginal densities, and the same product at the mode.
inline double mv_pdf_ratio(const std::vector<double>& mu, const std::vector<double>& var,
                           std::span<const double> z) {
  double q = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) q += (z[i] - mu[i]) * (z[i] - mu[i]) / var[i];
  return std::exp(-0.5 * q);
}

inline double mv_pdf(const std::vector<double>& mu, const std::vector<double>& var,
                     std::span<const double> z) {
  double norm = 1.0;
  for (double v : var) norm *= special::kInvSqrt2Pi / std::sqrt(v);
  return norm * mv_pdf_ratio(mu, var, z);
}

inline double mv_cdf(const std::vector<double>& mu, const std::vector<double>& var,
                     std::span<const double> z) {
  double p = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) p *= special::Phi((z[i] - mu[i]) / std::sqrt(var[i]));
  return p;
}

}  // namespace detail

/// Dimension a weight expects; nullopt when any dimension is accepted.
inline std::optional<std::size_t> weight_dimension(const WeightFunction& w) {
  return std::visit(
      [](const auto& f) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          return std::nullopt;
        } else if constexpr (detail::is_mv_gauss_v<T>) {
          return f.mu.size();
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          return f.lower.size();
        } else if constexpr (std::is_same_v<T, weights::HeatLevelIndicator>) {
          return 3;
        } else {
          return 1;
        }
      },
      w);
}

/// w(z) for a d-vector z.
inline double eval_weight(const WeightFunction& w, std::span<const double> z) {
  if (const auto d = weight_dimension(w)) {
    if (*d != z.size()) {
      std::ostringstream os;
      os << "eval_weight: weight expects dimension " << *d << ", got " << z.size();
      throw ContractViolation(os.str());
    }
  }
  return std::visit(
      [z](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          return z[0] > f.threshold ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          return z[0] < f.threshold ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, weights::GaussPdf>) {
          detail::check_sigma(f.sigma);
          return special::normal_pdf(z[0], f.mu, f.sigma);
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussPdfRatio>) {
          detail::check_sigma(f.sigma);
          const double r = (z[0] - f.mu) / f.sigma;
          return -std::expm1(-0.5 * r * r);
        } else if constexpr (std::is_same_v<T, weights::GaussCdf>) {
          detail::check_sigma(f.sigma);
          return special::normal_cdf(z[0], f.mu, f.sigma);
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussCdf>) {
          detail::check_sigma(f.sigma);
          return special::Phi_c((z[0] - f.mu) / f.sigma);
        } else if constexpr (std::is_same_v<T, weights::MvGaussPdf>) {
          detail::check_mv(f.mu, f.var);
          return detail::mv_pdf(f.mu, f.var, z);
        } else if constexpr (std::is_same_v<T, weights::OneMinusMvGaussPdfRatio>) {
          detail::check_mv(f.mu, f.var);
          return 1.0 - detail::mv_pdf_ratio(f.mu, f.var, z);
        } else if constexpr (std::is_same_v<T, weights::MvGaussCdf>) {
          detail::check_mv(f.mu, f.var);
          return detail::mv_cdf(f.mu, f.var, z);
        } else if constexpr (std::is_same_v<T, weights::OneMinusMvGaussCdf>) {
          detail::check_mv(f.mu, f.var);
          return 1.0 - detail::mv_cdf(f.mu, f.var, z);
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          require(f.lower.size() == f.upper.size(), "BoxIndicator: bound sizes differ");
          for (std::size_t i = 0; i < z.size(); ++i) {
            if (!(z[i] > f.lower[i] && z[i] <= f.upper[i])) return 0.0;
          }
          return 1.0;
        } else {
          return classify_heat_level(z, f.thresholds) == f.level ? 1.0 : 0.0;
        }
      },
      w);
}

inline double eval_weight(const WeightFunction& w, double z) {
  return eval_weight(w, std::span<const double>(&z, 1));
}

/// True for weights that only take the values 0 and 1.
inline bool is_binary(const WeightFunction& w) {
  return std::holds_alternative<weights::Constant>(w) ||
         std::holds_alternative<weights::IndicatorAbove>(w) ||
         std::holds_alternative<weights::IndicatorBelow>(w) ||
         std::holds_alternative<weights::BoxIndicator>(w) ||
         std::holds_alternative<weights::HeatLevelIndicator>(w);
}

inline std::string describe(const WeightFunction& w) {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&os](const std::vector<double>& v) {
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
  };
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          os << "constant";
        } else if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          os << "indicator_above(" << f.threshold << ")";
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          os << "indicator_below(" << f.threshold << ")";
        } else if constexpr (std::is_same_v<T, weights::GaussPdf>) {
          os << "gauss_pdf(" << f.mu << "," << f.sigma << ")";
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussPdfRatio>) {
          os << "one_minus_gauss_pdf_ratio(" << f.mu << "," << f.sigma << ")";
        } else if constexpr (std::is_same_v<T, weights::GaussCdf>) {
          os << "gauss_cdf(" << f.mu << "," << f.sigma << ")";
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussCdf>) {
          os << "one_minus_gauss_cdf(" << f.mu << "," << f.sigma << ")";
        } else if constexpr (detail::is_mv_gauss_v<T>) {
          if constexpr (std::is_same_v<T, weights::MvGaussPdf>) os << "mv_gauss_pdf(";
          if constexpr (std::is_same_v<T, weights::OneMinusMvGaussPdfRatio>) os << "one_minus_mv_gauss_pdf_ratio(";
          if constexpr (std::is_same_v<T, weights::MvGaussCdf>) os << "mv_gauss_cdf(";
          if constexpr (std::is_same_v<T, weights::OneMinusMvGaussCdf>) os << "one_minus_mv_gauss_cdf(";
          vec(f.mu);
          os << ",";
          vec(f.var);
          os << ")";
        } else if constexpr (std::is_same_v<T, weights::BoxIndicator>) {
          os << "box(";
          vec(f.lower);
          os << ",";
          vec(f.upper);
          os << ")";
        } else {
          os << "heat_level(" << to_int(f.level) << ")";
        }
      },
      w);
  return os.str();
}

// ---------------------------------------------------------------------------
// Chaining functions: v with v(z) - v(z') equal to the integral of w over
// [z', z]. Univariate chainings act componentwise on vectors.
// ---------------------------------------------------------------------------

namespace chainings {

struct Identity {};
/// v(z) = max(z, t); chains 1{z > t}.
struct CensorAbove {
  double threshold;
};
/// v(z) = min(z, t); chains 1{z < t}.
struct CensorBelow {
  double threshold;
};
/// v(z) = Phi((z - mu)/sigma); chains the Gaussian density weight.
struct GaussPdfChain {
  double mu;
  double sigma;
};
/// v(z) = z - sigma*sqrt(2 pi)*Phi((z - mu)/sigma); chains 1 - phi/phi(mu).
struct TailChain {
  double mu;
  double sigma;
};
/// v(z) = (z - mu)*Phi_{mu,sigma}(z) + sigma^2*phi_{mu,sigma}(z); chains Phi_{mu,sigma}.
struct GaussCdfChain {
  double mu;
  double sigma;
};
/// v(z) = z - GaussCdfChain(z); chains 1 - Phi_{mu,sigma}.
struct OneMinusGaussCdfChain {
  double mu;
  double sigma;
};
/// v(z) = z where w(z) = 1 and z0 where w(z) = 0; w must be {0,1}-valued.
struct CollapseOutside {
  WeightFunction weight;
  std::vector<double> z0;
};

}  // namespace chainings

using ChainingFunction =
    std::variant<chainings::Identity, chainings::CensorAbove, chainings::CensorBelow,
                 chainings::GaussPdfChain, chainings::TailChain, chainings::GaussCdfChain,
                 chainings::OneMinusGaussCdfChain, chainings::CollapseOutside>;

namespace detail {

inline double gauss_cdf_antiderivative(double z, double mu, double sigma) {
  const double r = (z - mu) / sigma;
  return (z - mu) * special::Phi(r) + sigma * special::phi(r);
}

}  // namespace detail

/// v(z) for a univariate chaining at a scalar.
inline double eval_chaining(const ChainingFunction& v, double z) {
  return std::visit(
      [z](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, chainings::Identity>) {
          return z;
        } else if constexpr (std::is_same_v<T, chainings::CensorAbove>) {
          return std::max(z, c.threshold);
        } else if constexpr (std::is_same_v<T, chainings::CensorBelow>) {
          return std::min(z, c.threshold);
        } else if constexpr (std::is_same_v<T, chainings::GaussPdfChain>) {
          detail::check_sigma(c.sigma);
          return special::Phi((z - c.mu) / c.sigma);
        } else if constexpr (std::is_same_v<T, chainings::TailChain>) {
          detail::check_sigma(c.sigma);
          return z - c.sigma * std::sqrt(2.0 * std::numbers::pi) * special::Phi((z - c.mu) / c.sigma);
        } else if constexpr (std::is_same_v<T, chainings::GaussCdfChain>) {
          detail::check_sigma(c.sigma);
          return detail::gauss_cdf_antiderivative(z, c.mu, c.sigma);
        } else if constexpr (std::is_same_v<T, chainings::OneMinusGaussCdfChain>) {
          detail::check_sigma(c.sigma);
          return z - detail::gauss_cdf_antiderivative(z, c.mu, c.sigma);
        } else {
          const double w = eval_weight(c.weight, z);
          require(c.z0.size() == 1, "CollapseOutside: z0 dimension must match z");
          if (w == 1.0) return z;
          if (w == 0.0) return c.z0[0];
          throw ContractViolation("CollapseOutside: weight must be {0,1}-valued");
        }
      },
      v);
}

/// v(z) for a d-vector z.
inline std::vector<double> eval_chaining(const ChainingFunction& v, std::span<const double> z) {
  if (const auto* c = std::get_if<chainings::CollapseOutside>(&v)) {
    require(c->z0.size() == z.size(), "CollapseOutside: z0 dimension must match z");
    const double w = eval_weight(c->weight, z);
    if (w == 1.0) return {z.begin(), z.end()};
    if (w == 0.0) return c->z0;
    throw ContractViolation("CollapseOutside: weight must be {0,1}-valued");
  }
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = eval_chaining(v, z[i]);
  return out;
}

/// The weight w = v' of a univariate chaining; nullopt for CollapseOutside.
inline std::optional<WeightFunction> chaining_weight(const ChainingFunction& v) {
  return std::visit(
      [](const auto& c) -> std::optional<WeightFunction> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, chainings::Identity>) {
          return weights::Constant{};
        } else if constexpr (std::is_same_v<T, chainings::CensorAbove>) {
          return weights::IndicatorAbove{c.threshold};
        } else if constexpr (std::is_same_v<T, chainings::CensorBelow>) {
          return weights::IndicatorBelow{c.threshold};
        } else if constexpr (std::is_same_v<T, chainings::GaussPdfChain>) {
          return weights::GaussPdf{c.mu, c.sigma};
        } else if constexpr (std::is_same_v<T, chainings::TailChain>) {
          return weights::OneMinusGaussPdfRatio{c.mu, c.sigma};
        } else if constexpr (std::is_same_v<T, chainings::GaussCdfChain>) {
          return weights::GaussCdf{c.mu, c.sigma};
        } else if constexpr (std::is_same_v<T, chainings::OneMinusGaussCdfChain>) {
          return weights::OneMinusGaussCdf{c.mu, c.sigma};
        } else {
          return std::nullopt;
        }
      },
      v);
}

/// Canonical chaining for a univariate weight; nullopt when none is defined.
inline std::optional<ChainingFunction> canonical_chaining(const WeightFunction& w) {
  return std::visit(
      [](const auto& f) -> std::optional<ChainingFunction> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, weights::Constant>) {
          return chainings::Identity{};
        } else if constexpr (std::is_same_v<T, weights::IndicatorAbove>) {
          return chainings::CensorAbove{f.threshold};
        } else if constexpr (std::is_same_v<T, weights::IndicatorBelow>) {
          return chainings::CensorBelow{f.threshold};
        } else if constexpr (std::is_same_v<T, weights::GaussPdf>) {
          return chainings::GaussPdfChain{f.mu, f.sigma};
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussPdfRatio>) {
          return chainings::TailChain{f.mu, f.sigma};
        } else if constexpr (std::is_same_v<T, weights::GaussCdf>) {
          return chainings::GaussCdfChain{f.mu, f.sigma};
        } else if constexpr (std::is_same_v<T, weights::OneMinusGaussCdf>) {
          return chainings::OneMinusGaussCdfChain{f.mu, f.sigma};
        } else {
          return std::nullopt;
        }
      },
      w);
}

inline std::string describe(const ChainingFunction& v) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, chainings::Identity>) {
          os << "identity";
        } else if constexpr (std::is_same_v<T, chainings::CensorAbove>) {
          os << "censor_above(" << c.threshold << ")";
        } else if constexpr (std::is_same_v<T, chainings::CensorBelow>) {
          os << "censor_below(" << c.threshold << ")";
        } else if constexpr (std::is_same_v<T, chainings::CollapseOutside>) {
          os << "collapse_outside(" << describe(c.weight) << ",[";
          for (std::size_t i = 0; i < c.z0.size(); ++i) os << (i ? "," : "") << c.z0[i];
          os << "])";
        } else {
          os << "chain[" << describe(*chaining_weight(ChainingFunction{c})) << "]";
        }
      },
      v);
  return os.str();
}

}  // namespace wxverif
