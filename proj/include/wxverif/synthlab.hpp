#pragma once

#include "wxverif/calibration.hpp"
#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/rng.hpp"
#include "wxverif/core/special.hpp"
#include "wxverif/core/weight.hpp"
#include "wxverif/mvscores.hpp"
#include "wxverif/postprocess.hpp"
#include "wxverif/uniscores.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wxverif {

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

enum class ExperimentKind { kFig1Curves, kFig2Ideal, kFig3Tails, kProprietyMc, kImproprietyDemo };

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kFig1Curves: return "fig1_curves";
    case ExperimentKind::kFig2Ideal: return "fig2_ideal";
    case ExperimentKind::kFig3Tails: return "fig3_tails";
    case ExperimentKind::kProprietyMc: return "propriety_mc";
    case ExperimentKind::kImproprietyDemo: return "impropriety_demo";
  }
  return "?";
}

/// Accepts the full names and the short forms fig1, fig2, fig3, propriety, impropriety.
inline std::optional<ExperimentKind> parse_experiment(std::string_view s) {
  for (auto k : {ExperimentKind::kFig1Curves, ExperimentKind::kFig2Ideal, ExperimentKind::kFig3Tails,
                 ExperimentKind::kProprietyMc, ExperimentKind::kImproprietyDemo}) {
    const auto full = to_string(k);
    if (s == full || s == full.substr(0, full.find('_'))) return k;
  }
  return std::nullopt;
}

inline std::size_t default_samples(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kFig1Curves: return 401;
    case ExperimentKind::kFig2Ideal: return 100000;
    case ExperimentKind::kFig3Tails: return 1000000;
    case ExperimentKind::kProprietyMc: return 100000;
    case ExperimentKind::kImproprietyDemo: return 100000;
  }
  return 1;
}

inline std::vector<double> default_thresholds(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kFig3Tails: return {2.0};
    case ExperimentKind::kImproprietyDemo: return {0.5};
    default: return {1.0};
  }
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kFig2Ideal;
  std::size_t n = 0;  // 0 selects default_samples(kind)
  std::uint64_t seed = 0;
  std::vector<double> thresholds{};  // empty selects default_thresholds(kind)
  std::string output{};

  std::size_t samples() const { return n == 0 ? default_samples(kind) : n; }
  double threshold() const { return thresholds.empty() ? default_thresholds(kind).front() : thresholds.front(); }

  void validate() const {
    require(samples() >= 1, "experiment: n must be at least 1");
    for (double t : thresholds) require(std::isfinite(t), "experiment: thresholds must be finite");
  }
};

// ---------------------------------------------------------------------------
// Score curves of a standard normal forecast
// ---------------------------------------------------------------------------

struct CurveRow {
  double y;
  double crps;
  double twcrps;
  double owcrps;
  double vrcrps;
};

/// Scores of N(0,1) against each y in the grid, with w = 1{z > t}; vrCRPS
/// uses x0 = 0.
inline std::vector<CurveRow> run_fig1_curves(std::span<const double> ygrid, double t = 1.0) {
  const Parametric f = Normal(0.0, 1.0);
  const WeightFunction w = weights::IndicatorAbove{t};
  const auto tw = twcrps_many(f, ygrid, *canonical_chaining(w));
  const auto vr = VrCrps(f, w, 0.0)(ygrid);
  const auto crps_w = crps_of_weighted_many(f, ygrid, w);
  std::vector<CurveRow> rows;
  rows.reserve(ygrid.size());
  for (std::size_t i = 0; i < ygrid.size(); ++i) {
    const double y = ygrid[i];
    rows.push_back({y, crps_normal(0.0, 1.0, y), tw[i], eval_weight(w, y) * crps_w[i], vr[i]});
  }
  return rows;
}

/// n evenly spaced points on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  require(n >= 2 && hi > lo, "linear_grid: needs n >= 2 and hi > lo");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

// ---------------------------------------------------------------------------
// Ideal forecaster: PIT, restricted PIT and conditional PIT
// ---------------------------------------------------------------------------

struct IdealResult {
  HistogramSummary pit;
  /// PIT values of the cases with y > t only.
  HistogramSummary restricted_pit;
  HistogramSummary cpit;
  std::size_t exceedances = 0;
};

/// Case i: mu ~ N(0, 1 - variance), y ~ N(mu, variance), forecast N(mu, variance).
inline IdealResult run_fig2_ideal(std::size_t n = 100000, double variance = 1.0 / 3.0, double t = 1.0,
                                  std::uint64_t seed = 0, std::size_t bins = kDefaultPitBins) {
  require(variance > 0.0 && variance < 1.0, "fig2: variance must lie in (0, 1)");
  const double sd = std::sqrt(variance);
  const double mean_sd = std::sqrt(1.0 - variance);
  std::vector<double> pits(n), restricted, cpits;
  for (std::size_t i = 0; i < n; ++i) {
    auto gen = case_stream(seed, i);
    const double mu = mean_sd * special::Phi_inv(uniform_open01(gen));
    const double y = mu + sd * special::Phi_inv(uniform_open01(gen));
    const Parametric f = Normal(mu, variance);
    pits[i] = pit(f, y);
    if (const auto c = cpit(f, y, t)) {
      restricted.push_back(pits[i]);
      cpits.push_back(*c);
    }
  }
  IdealResult r;
  r.pit = pit_histogram(pits, bins);
  r.restricted_pit = pit_histogram(restricted, bins);
  r.cpit = pit_histogram(cpits, bins);
  r.exceedances = cpits.size();
  return r;
}

// ---------------------------------------------------------------------------
// Tail misspecification: light, matched and heavy tails
// ---------------------------------------------------------------------------

struct TailForecasterResult {
  std::string name;
  HistogramSummary cpit;
  std::vector<EcdfPoint> cpit_ecdf;
  double ecdf_max_deviation = 0.0;
  /// Reliability of P(Y > t) = 1 - F(t) over all cases.
  ReliabilityFit exceedance_reliability;
};

struct TailsResult {
  std::size_t n = 0;
  double threshold = 0.0;
  std::size_t exceedances = 0;
  std::vector<TailForecasterResult> forecasters;
};

/// Logistic truth with unit total variance: mu ~ N(0, 2/3), y ~ Logistic(mu, 1/pi).
/// Each forecaster has the truth's conditional mean and variance 1/3.
inline TailsResult run_fig3_tails(std::size_t n = 1000000, double t = 2.0, std::uint64_t seed = 0,
                                  std::size_t bins = kDefaultPitBins, CorpOptions corp = {.resamples = 200}) {
  constexpr double kCondVariance = 1.0 / 3.0;
  const double mean_sd = std::sqrt(1.0 - kCondVariance);
  const double scale = std::numbers::inv_pi;
  std::vector<double> mus(n), ys(n);
  std::vector<int> exceed(n);
  TailsResult r;
  r.n = n;
  r.threshold = t;
  for (std::size_t i = 0; i < n; ++i) {
    auto gen = case_stream(seed, i);
    mus[i] = mean_sd * special::Phi_inv(uniform_open01(gen));
    const double u = uniform_open01(gen);
    ys[i] = mus[i] + scale * std::log(u / (1.0 - u));
    exceed[i] = ys[i] > t ? 1 : 0;
    r.exceedances += static_cast<std::size_t>(exceed[i]);
  }

  const std::vector<std::pair<std::string, std::function<Parametric(double)>>> makers = {
      {"normal", [](double mu) { return Parametric(Normal(mu, kCondVariance)); }},
      {"logistic", [scale](double mu) { return Parametric(Logistic(mu, scale)); }},
      {"student_t5", [](double mu) { return Parametric(StudentT::moment_matched(5.0, mu, kCondVariance)); }},
  };
  corp.seed = stream_seed(seed, 0x7a11);
  for (const auto& [name, make] : makers) {
    TailForecasterResult fr;
    fr.name = name;
    std::vector<double> cpits, probs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Parametric f = make(mus[i]);
      probs[i] = sf(f, t);
      if (const auto c = cpit(f, ys[i], t)) cpits.push_back(*c);
    }
    fr.cpit = pit_histogram(cpits, bins);
    fr.cpit_ecdf = pit_ecdf(cpits);
    fr.ecdf_max_deviation = fr.cpit_ecdf.empty() ? 0.0 : ecdf_max_deviation(fr.cpit_ecdf);
    fr.exceedance_reliability = corp_reliability(probs, exceed, corp);
    r.forecasters.push_back(std::move(fr));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo propriety harness
//
// For a pair (G, F) the observations are drawn from G and both forecasts are
// scored on the same draws; the verdict uses the standard error of the paired
// difference S(F, y) - S(G, y).
// ---------------------------------------------------------------------------

struct ProprietyRow {
  std::string score;
  std::string pair;
  double mean_truth = 0.0;
  double mean_alt = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  bool pass = false;
};

namespace detail {

inline ProprietyRow compare_scores(std::string score, std::string pair, std::span<const double> truth,
                                   std::span<const double> alt, double margin = 2.0) {
  RunningMoments diff, a, b;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    a.push(truth[i]);
    b.push(alt[i]);
    diff.push(alt[i] - truth[i]);
  }
  ProprietyRow row{std::move(score), std::move(pair), a.mean(), b.mean(), 0.0, truth.size(), false};
  row.se = truth.size() > 1 ? std::sqrt(diff.sample_variance() / static_cast<double>(truth.size())) : 0.0;
  row.pass = row.mean_truth <= row.mean_alt + margin * row.se;
  return row;
}

}  // namespace detail

struct UnivariatePair {
  Parametric truth;
  Parametric alt;
};

struct UnivariateScore {
  std::string name;
  std::function<std::vector<double>(const Parametric&, std::span<const double>)> batch;
};

/// CRPS, twCRPS under each standard weight family, owCRPS+BS and vrCRPS.
/// Gaussian weights are centred at t with unit spread.
inline std::vector<UnivariateScore> standard_univariate_scores(double t = 1.0) {
  std::vector<UnivariateScore> s;
  s.push_back({"crps", [](const Parametric& f, std::span<const double> ys) {
                 std::vector<double> out(ys.size());
                 const Forecast ff = to_forecast(f);
                 for (std::size_t i = 0; i < ys.size(); ++i) out[i] = crps(ff, ys[i]);
                 return out;
               }});
  const std::vector<std::pair<std::string, WeightFunction>> tw_weights = {
      {"twcrps[constant]", weights::Constant{}},
      {"twcrps[gauss_pdf]", weights::GaussPdf{t, 1.0}},
      {"twcrps[one_minus_gauss_pdf_ratio]", weights::OneMinusGaussPdfRatio{t, 1.0}},
      {"twcrps[gauss_cdf]", weights::GaussCdf{t, 1.0}},
      {"twcrps[one_minus_gauss_cdf]", weights::OneMinusGaussCdf{t, 1.0}},
      {"twcrps[indicator_above]", weights::IndicatorAbove{t}},
  };
  for (const auto& [name, w] : tw_weights) {
    const ChainingFunction v = *canonical_chaining(w);
    s.push_back({name, [v](const Parametric& f, std::span<const double> ys) { return twcrps_many(f, ys, v); }});
  }
  s.push_back({"owcrps_bs", [t](const Parametric& f, std::span<const double> ys) { return owcrps_bs_many(f, ys, t); }});
  s.push_back({"vrcrps[indicator_above]", [t](const Parametric& f, std::span<const double> ys) {
                 return VrCrps(f, weights::IndicatorAbove{t}, 0.0)(ys);
               }});
  return s;
}

/// The two reference pairs N(0,1) vs N(1,1) and N(0,1) vs N(0,4), then random
/// normal/logistic pairs whose means differ by 0.25 to 1 and whose standard
/// deviations differ by a factor of 1.2 to 1.8.
inline std::vector<UnivariatePair> random_univariate_pairs(std::size_t count, std::uint64_t seed) {
  std::vector<UnivariatePair> pairs;
  if (count > 0) pairs.push_back({Normal(0.0, 1.0), Normal(1.0, 1.0)});
  if (count > 1) pairs.push_back({Normal(0.0, 1.0), Normal(0.0, 4.0)});
  const auto make = [](bool logistic, double mean, double sd) -> Parametric {
    if (logistic) return Logistic(mean, sd * std::numbers::sqrt3 * std::numbers::inv_pi);
    return Normal(mean, sd * sd);
  };
  for (std::size_t k = pairs.size(); k < count; ++k) {
    auto gen = case_stream(seed, k);
    const auto u = [&gen] { return uniform01(gen); };
    const bool g_log = u() < 0.5;
    const bool f_log = u() < 0.5;
    const double g_mean = -1.0 + 2.0 * u();
    const double g_sd = 0.8 + 0.7 * u();
    const double shift = (u() < 0.5 ? -1.0 : 1.0) * (0.25 + 0.75 * u());
    const double ratio = std::pow(u() < 0.5 ? 1.2 : 1.0 / 1.2, 1.0 + 2.2 * u());
    pairs.push_back({make(g_log, g_mean, g_sd), make(f_log, g_mean + shift, g_sd * ratio)});
  }
  return pairs;
}

inline std::string describe(const UnivariatePair& p) { return describe(p.truth) + " vs " + describe(p.alt); }

inline std::vector<ProprietyRow> propriety_univariate(const std::vector<UnivariateScore>& scores,
                                                      const std::vector<UnivariatePair>& pairs, std::size_t n,
                                                      std::uint64_t seed) {
  std::vector<ProprietyRow> rows;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::uint64_t pair_seed = stream_seed(seed, k);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto gen = case_stream(pair_seed, i);
      ys[i] = sample(pairs[k].truth, gen);
    }
    for (const auto& s : scores) {
      rows.push_back(detail::compare_scores(s.name, describe(pairs[k]), s.batch(pairs[k].truth, ys),
                                            s.batch(pairs[k].alt, ys)));
    }
  }
  return rows;
}

/// Multivariate normal with a dense d x d covariance (row-major).
class GaussianModel {
 public:
  GaussianModel(std::vector<double> mean, std::vector<double> cov) : mean_(std::move(mean)), chol_(std::move(cov)) {
    const std::size_t d = mean_.size();
    require(d >= 1 && chol_.size() == d * d, "GaussianModel: covariance must be d x d");
    for (std::size_t j = 0; j < d; ++j) {
      double diag = chol_[j * d + j];
      for (std::size_t k = 0; k < j; ++k) diag -= chol_[j * d + k] * chol_[j * d + k];
      require(diag > 0.0, "GaussianModel: covariance must be positive definite");
      chol_[j * d + j] = std::sqrt(diag);
      for (std::size_t i = j + 1; i < d; ++i) {
        double v = chol_[i * d + j];
        for (std::size_t k = 0; k < j; ++k) v -= chol_[i * d + k] * chol_[j * d + k];
        chol_[i * d + j] = v / chol_[j * d + j];
      }
      for (std::size_t k = j + 1; k < d; ++k) chol_[j * d + k] = 0.0;
    }
  }

  /// Equicorrelated model with common mean and standard deviation.
  static GaussianModel exchangeable(std::size_t d, double mean, double sd, double corr) {
    std::vector<double> cov(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i * d + j] = sd * sd * (i == j ? 1.0 : corr);
    GaussianModel g(std::vector<double>(d, mean), std::move(cov));
    g.label_ = "N" + std::to_string(d) + "(mean=" + std::to_string(mean) + ", sd=" + std::to_string(sd) +
               ", corr=" + std::to_string(corr) + ")";
    return g;
  }

  std::size_t dims() const { return mean_.size(); }
  const std::string& label() const { return label_; }

  /// mean + L z for standard normal z.
  void transform(std::span<const double> z, std::span<double> out) const {
    const std::size_t d = dims();
    for (std::size_t i = 0; i < d; ++i) {
      double v = mean_[i];
      for (std::size_t k = 0; k <= i; ++k) v += chol_[i * d + k] * z[k];
      out[i] = v;
    }
  }

 private:
  std::vector<double> mean_;
  std::vector<double> chol_;
  std::string label_ = "N(custom)";
};

struct MultivariatePair {
  GaussianModel truth;
  GaussianModel alt;
};

struct MultivariateScore {
  std::string name;
  std::function<double(const MvEnsemble&, std::span<const double>)> score;
};

/// ES, VS(p = 0.5), twES, twVS (componentwise censoring at t) and vrES
/// (product of Gaussian CDF weights at t), all with fair spread terms.
inline std::vector<MultivariateScore> standard_multivariate_scores(std::size_t d, double t = 1.0) {
  const EnsembleOptions fair{.fair = true};
  const ChainingFunction v = chainings::CensorAbove{t};
  const WeightFunction w = weights::MvGaussCdf{std::vector<double>(d, t), std::vector<double>(d, 1.0)};
  const std::vector<double> x0(d, 0.0);
  return {
      {"es", [fair](const MvEnsemble& e, std::span<const double> y) { return energy_score(e, y, fair); }},
      {"vs_p0.5", [fair](const MvEnsemble& e, std::span<const double> y) { return variogram_score(e, y, {}, fair); }},
      {"tw_es", [fair, v](const MvEnsemble& e, std::span<const double> y) { return tw_energy_score(e, y, v, fair); }},
      {"tw_vs_p0.5",
       [fair, v](const MvEnsemble& e, std::span<const double> y) { return tw_variogram_score(e, y, v, {}, fair); }},
      {"vr_es", [fair, w, x0](const MvEnsemble& e, std::span<const double> y) {
         return vr_energy_score(e, y, w, x0, fair);
       }},
  };
}

/// Exchangeable Gaussian pairs: correlations at least 0.3 apart, means up to
/// 0.5 apart and standard deviations up to 25% apart.
inline std::vector<MultivariatePair> random_multivariate_pairs(std::size_t count, std::size_t d,
                                                               std::uint64_t seed) {
  std::vector<MultivariatePair> pairs;
  for (std::size_t k = 0; k < count; ++k) {
    auto gen = case_stream(seed, k);
    const auto u = [&gen] { return uniform01(gen); };
    const double g_corr = 0.8 * u();
    const double gap = 0.3 + 0.3 * u();
    const double f_corr = g_corr + gap <= 0.9 ? g_corr + gap : g_corr - gap;
    const double g_mean = -0.5 + u();
    const double g_sd = 0.8 + 0.4 * u();
    const double f_mean = g_mean + 0.5 * (2.0 * u() - 1.0);
    const double f_sd = g_sd * (0.75 + 0.5 * u());
    pairs.push_back({GaussianModel::exchangeable(d, g_mean, g_sd, g_corr),
                     GaussianModel::exchangeable(d, f_mean, f_sd, f_corr)});
  }
  return pairs;
}

/// Each case draws y from the truth and an m-member ensemble from each model,
/// the two ensembles sharing their standard normal draws.
inline std::vector<ProprietyRow> propriety_multivariate(const std::vector<MultivariateScore>& scores,
                                                        const std::vector<MultivariatePair>& pairs, std::size_t n,
                                                        std::size_t members, std::uint64_t seed) {
  std::vector<ProprietyRow> rows;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& pr = pairs[k];
    const std::size_t d = pr.truth.dims();
    require(pr.alt.dims() == d, "propriety: pair dimensions differ");
    const std::uint64_t pair_seed = stream_seed(seed, k);
    std::vector<std::vector<double>> truth_scores(scores.size(), std::vector<double>(n));
    auto alt_scores = truth_scores;
    std::vector<double> z(d), y(d), xt(d * members), xa(d * members);
    for (std::size_t i = 0; i < n; ++i) {
      auto gen = case_stream(pair_seed, i);
      for (auto& v : z) v = special::Phi_inv(uniform_open01(gen));
      pr.truth.transform(z, y);
      for (std::size_t j = 0; j < members; ++j) {
        for (auto& v : z) v = special::Phi_inv(uniform_open01(gen));
        pr.truth.transform(z, std::span<double>(xt).subspan(j * d, d));
        pr.alt.transform(z, std::span<double>(xa).subspan(j * d, d));
      }
      const auto et = MvEnsemble(d, members, xt);
      const auto ea = MvEnsemble(d, members, xa);
      for (std::size_t s = 0; s < scores.size(); ++s) {
        truth_scores[s][i] = scores[s].score(et, y);
        alt_scores[s][i] = scores[s].score(ea, y);
      }
    }
    for (std::size_t s = 0; s < scores.size(); ++s) {
      rows.push_back(detail::compare_scores(scores[s].name, pr.truth.label() + " vs " + pr.alt.label(),
                                            truth_scores[s], alt_scores[s]));
    }
  }
  return rows;
}

struct ProprietyOptions {
  std::size_t pairs = 20;
  std::size_t univariate_draws = 100000;
  std::size_t multivariate_draws = 20000;
  std::size_t members = 50;
  std::size_t dims = 3;
  double threshold = 1.0;
  std::uint64_t seed = 0;
};

/// The full standard battery: every univariate and multivariate score over
/// `pairs` pairs each.
inline std::vector<ProprietyRow> run_propriety_mc(const ProprietyOptions& opt) {
  auto rows = propriety_univariate(standard_univariate_scores(opt.threshold),
                                   random_univariate_pairs(opt.pairs, stream_seed(opt.seed, 1)),
                                   opt.univariate_draws, stream_seed(opt.seed, 2));
  auto mv = propriety_multivariate(standard_multivariate_scores(opt.dims, opt.threshold),
                                   random_multivariate_pairs(opt.pairs, opt.dims, stream_seed(opt.seed, 3)),
                                   opt.multivariate_draws, opt.members, stream_seed(opt.seed, 4));
  rows.insert(rows.end(), std::make_move_iterator(mv.begin()), std::make_move_iterator(mv.end()));
  return rows;
}

// ---------------------------------------------------------------------------
// Naive outcome weighting versus threshold weighting
// ---------------------------------------------------------------------------

struct ImproprietyResult {
  double threshold = 0.0;
  std::size_t n = 0;
  /// Mean of w(y) CRPS(F, y), for the truth N(0,1) and its truncation above t.
  ProprietyRow naive;
  /// Mean twCRPS with v(z) = max(z, t), for the same two forecasts.
  ProprietyRow threshold_weighted;
};

/// In both rows `mean_truth` belongs to N(0,1) and `mean_alt` to the
/// truncated forecast; `pass` reports whether the truth wins.
inline ImproprietyResult run_impropriety_demo(double t = 0.5, std::size_t n = 100000, std::uint64_t seed = 0) {
  const Parametric g = Normal(0.0, 1.0);
  const WeightFunction w = weights::IndicatorAbove{t};
  std::vector<double> ys(n), censored(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto gen = case_stream(seed, i);
    ys[i] = sample(g, gen);
    censored[i] = std::max(ys[i], t);
  }
  // The truncation puts no mass below t, so its twCRPS is its CRPS at max(y, t).
  const auto trunc_at_censored = crps_of_weighted_many(g, censored, w);
  const auto tw_truth = twcrps_many(g, ys, chainings::CensorAbove{t});
  std::vector<double> naive_truth(n), naive_trunc(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wy = eval_weight(w, ys[i]);
    naive_truth[i] = wy * crps_normal(0.0, 1.0, ys[i]);
    naive_trunc[i] = wy * trunc_at_censored[i];
  }
  ImproprietyResult r;
  r.threshold = t;
  r.n = n;
  r.naive = detail::compare_scores("naive_weighted_crps", "N(0,1) vs truncated above t", naive_truth, naive_trunc);
  r.threshold_weighted =
      detail::compare_scores("twcrps", "N(0,1) vs truncated above t", tw_truth, trunc_at_censored);
  return r;
}

}  // namespace wxverif
