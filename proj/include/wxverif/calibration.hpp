#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wxverif {

/// Histograms of PIT-type values use 20 bins unless told otherwise.
inline constexpr std::size_t kDefaultPitBins = 20;

/// F(t) >= 1 - this makes the conditional PIT undefined.
inline constexpr double kConditionalFloor = 1e-12;

/// Ensembles need this many members above the threshold before a
/// conditional check is attempted.
inline constexpr std::size_t kMinExceedingMembers = 10;

// ---------------------------------------------------------------------------
// PIT, ranks and histograms
// ---------------------------------------------------------------------------

inline double pit(const Parametric& f, double y) {
  if (y == -INFINITY) return 0.0;
  if (y == INFINITY) return 1.0;
  return cdf(f, y);
}

/// Rank of y among the members, 1..m+1. Ties with members are broken
/// uniformly using `gen`.
template <class URBG>
int rank(std::span<const double> members, double y, URBG& gen) {
  require(!members.empty(), "rank: needs at least one member");
  std::size_t below = 0;
  std::size_t ties = 0;
  for (double x : members) {
    below += x < y;
    ties += x == y;
  }
  std::size_t extra = 0;
  if (ties > 0) extra = std::uniform_int_distribution<std::size_t>(0, ties)(gen);
  return static_cast<int>(below + extra + 1);
}

inline int rank(std::span<const double> members, double y, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return rank(members, y, gen);
}

struct HistogramSummary {
  std::vector<std::size_t> counts;
  std::vector<double> frequencies;
  std::size_t n = 0;
  double reliability_index = 0.0;

  std::size_t bins() const { return counts.size(); }
};

/// Sum over bins of |frequency - 1/k|.
inline double reliability_index(const HistogramSummary& h) {
  require(!h.frequencies.empty(), "reliability_index: empty histogram");
  const double uniform = 1.0 / static_cast<double>(h.frequencies.size());
  double ri = 0.0;
  for (double f : h.frequencies) ri += std::abs(f - uniform);
  return ri;
}

inline HistogramSummary summarize_counts(std::vector<std::size_t> counts) {
  HistogramSummary h;
  h.n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  h.frequencies.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    h.frequencies[b] = h.n ? static_cast<double>(counts[b]) / static_cast<double>(h.n) : 0.0;
  }
  h.counts = std::move(counts);
  if (h.n > 0) h.reliability_index = reliability_index(h);
  return h;
}

/// Equal-width histogram of values in [0, 1]; bin b covers [b/k, (b+1)/k),
/// the last bin also holds 1.
inline HistogramSummary pit_histogram(std::span<const double> values, std::size_t bins = kDefaultPitBins) {
  require(bins >= 1, "pit_histogram: needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (double u : values) {
    require(u >= 0.0 && u <= 1.0, "pit_histogram: values must lie in [0, 1]");
    const auto b = std::min(static_cast<std::size_t>(u * static_cast<double>(bins)), bins - 1);
    ++counts[b];
  }
  return summarize_counts(std::move(counts));
}

/// Histogram of ranks 1..m+1.
inline HistogramSummary rank_histogram(std::span<const int> ranks, std::size_t members) {
  std::vector<std::size_t> counts(members + 1, 0);
  for (int r : ranks) {
    require(r >= 1 && static_cast<std::size_t>(r) <= members + 1, "rank_histogram: rank out of range");
    ++counts[static_cast<std::size_t>(r - 1)];
  }
  return summarize_counts(std::move(counts));
}

// ---------------------------------------------------------------------------
// Conditional PIT for threshold exceedances
// ---------------------------------------------------------------------------

/// (F(y) - F(t)) / (1 - F(t)) when y > t; empty otherwise.
inline std::optional<double> cpit(const Parametric& f, double y, double t) {
  if (!(y > t)) return std::nullopt;
  const double ft = t == -INFINITY ? 0.0 : cdf(f, t);
  const double st = t == -INFINITY ? 1.0 : sf(f, t);
  if (st <= kConditionalFloor) {
    throw DegenerateConditional("cpit: F(t) is numerically one at t = " + std::to_string(t) +
                                "; the conditional distribution is undefined");
  }
  // Work from whichever tail keeps precision.
  const double u = ft <= 0.5 ? (pit(f, y) - ft) / st : (st - (y == INFINITY ? 0.0 : sf(f, y))) / st;
  return std::clamp(u, 0.0, 1.0);
}

/// cpit for an ensemble, through its normal smoothing N(mean, var). The raw
/// ensemble must have at least `min_exceeding` members above t.
inline std::optional<double> cpit_ensemble(std::span<const double> members, double y, double t,
                                           std::size_t min_exceeding = kMinExceedingMembers) {
  require(members.size() >= 2, "cpit_ensemble: needs at least two members");
  if (!(y > t)) return std::nullopt;
  const auto above = static_cast<std::size_t>(std::count_if(members.begin(), members.end(), [t](double x) { return x > t; }));
  if (above < min_exceeding) {
    throw Unsupported("cpit_ensemble: only " + std::to_string(above) + " members exceed t = " + std::to_string(t) +
                      ", at least " + std::to_string(min_exceeding) + " are required");
  }
  const double m = static_cast<double>(members.size());
  const double mean = std::accumulate(members.begin(), members.end(), 0.0) / m;
  double ss = 0.0;
  for (double x : members) ss += (x - mean) * (x - mean);
  return cpit(Normal(mean, std::max(ss / (m - 1.0), 1e-6)), y, t);
}

// ---------------------------------------------------------------------------
// PIT reliability diagram
// ---------------------------------------------------------------------------

struct EcdfPoint {
  double value;
  double cumulative;
};

/// Steps (u_(i), i/n) of the empirical CDF of the values.
inline std::vector<EcdfPoint> pit_ecdf(std::span<const double> values) {
  require(!values.empty(), "pit_ecdf: needs at least one value");
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  std::vector<EcdfPoint> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = {u[i], static_cast<double>(i + 1) / n};
  return out;
}

/// sup_u |ECDF(u) - u| over the step function.
inline double ecdf_max_deviation(std::span<const EcdfPoint> pts) {
  double d = 0.0;
  double prev = 0.0;
  for (const auto& p : pts) {
    d = std::max({d, std::abs(p.cumulative - p.value), std::abs(p.value - prev)});
    prev = p.cumulative;
  }
  return d;
}

// ---------------------------------------------------------------------------
// CORP reliability: isotonic conditional event probabilities
// ---------------------------------------------------------------------------

/// Pool-adjacent-violators fit over groups already sorted by forecast value:
/// group i holds counts[i] cases whose outcomes sum to totals[i]. Returns the
/// fitted non-decreasing mean per group.
inline std::vector<double> pav_fit(std::span<const double> totals, std::span<const double> counts) {
  struct Block {
    double total;
    double count;
    std::size_t len;
  };
  std::vector<Block> stack;
  stack.reserve(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    stack.push_back({totals[i], counts[i], 1});
    while (stack.size() >= 2) {
      const auto& b = stack[stack.size() - 1];
      const auto& a = stack[stack.size() - 2];
      if (a.total * b.count <= b.total * a.count) break;
      Block merged{a.total + b.total, a.count + b.count, a.len + b.len};
      stack.pop_back();
      stack.back() = merged;
    }
  }
  std::vector<double> fit;
  fit.reserve(totals.size());
  for (const auto& b : stack) fit.insert(fit.end(), b.len, b.total / b.count);
  return fit;
}

struct ReliabilityFit {
  /// Distinct forecast probabilities, ascending, and the isotonic CEP at each.
  std::vector<double> probs;
  std::vector<double> cep;
  /// Consistency band under calibration, on a grid of forecast values.
  std::vector<double> band_probs;
  std::vector<double> band_lower;
  std::vector<double> band_upper;
  double band_level = 0.99;
  std::size_t resamples = 0;
  std::size_t n = 0;

  /// Fitted CEP at forecast value p (step function, right-continuous).
  double cep_at(double p) const {
    const auto it = std::upper_bound(probs.begin(), probs.end(), p);
    if (it == probs.begin()) return cep.front();
    return cep[static_cast<std::size_t>(it - probs.begin()) - 1];
  }
};

struct CorpOptions {
  double band_level = 0.99;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  /// Band evaluated at no more than this many distinct forecast values.
  std::size_t band_points = 200;
};

namespace detail {

struct PooledTies {
  std::vector<double> values;
  std::vector<double> totals;
  std::vector<double> counts;
  std::vector<std::size_t> group;  // group of each input, in sorted order
  std::vector<std::size_t> order;  // sorted position -> input index
};

inline PooledTies pool_ties(std::span<const double> probs) {
  PooledTies p;
  p.order.resize(probs.size());
  std::iota(p.order.begin(), p.order.end(), std::size_t{0});
  std::stable_sort(p.order.begin(), p.order.end(), [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  p.group.resize(probs.size());
  for (std::size_t k = 0; k < p.order.size(); ++k) {
    const double v = probs[p.order[k]];
    if (p.values.empty() || v != p.values.back()) {
      p.values.push_back(v);
      p.counts.push_back(0.0);
    }
    p.counts.back() += 1.0;
    p.group[k] = p.values.size() - 1;
  }
  p.totals.assign(p.values.size(), 0.0);
  return p;
}

}  // namespace detail

/// Isotonic regression of binary outcomes on forecast probabilities, with a
/// resampled consistency band: outcomes are redrawn as Bernoulli(p_i),
/// refitted, and pointwise quantiles at (1 -/+ level)/2 are kept.
inline ReliabilityFit corp_reliability(std::span<const double> probs, std::span<const int> outcomes,
                                       const CorpOptions& opt = {}) {
  require(probs.size() == outcomes.size(), "corp_reliability: probabilities and outcomes differ in length");
  require(!probs.empty(), "corp_reliability: needs at least one case");
  require(opt.band_level > 0.0 && opt.band_level < 1.0, "corp_reliability: band level must be in (0, 1)");
  for (double p : probs) require(p >= 0.0 && p <= 1.0, "corp_reliability: probabilities must lie in [0, 1]");
  for (int o : outcomes) require(o == 0 || o == 1, "corp_reliability: outcomes must be 0 or 1");

  auto pooled = detail::pool_ties(probs);
  for (std::size_t k = 0; k < pooled.order.size(); ++k) pooled.totals[pooled.group[k]] += outcomes[pooled.order[k]];

  ReliabilityFit fit;
  fit.n = probs.size();
  fit.band_level = opt.band_level;
  fit.resamples = opt.resamples;
  fit.probs = pooled.values;
  fit.cep = pav_fit(pooled.totals, pooled.counts);
  if (opt.resamples == 0) return fit;

  // Band grid: evenly spaced ranks among the distinct values.
  const std::size_t g = pooled.values.size();
  const std::size_t pts = std::min(opt.band_points, g);
  std::vector<std::size_t> grid(pts);
  for (std::size_t i = 0; i < pts; ++i) {
    grid[i] = pts == 1 ? 0 : static_cast<std::size_t>(std::llround(static_cast<double>(i) * static_cast<double>(g - 1) / static_cast<double>(pts - 1)));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::vector<double>> draws(grid.size(), std::vector<double>(opt.resamples));
  std::vector<double> totals(g);
  for (std::size_t r = 0; r < opt.resamples; ++r) {
    auto gen = make_stream(opt.seed, r);
    std::fill(totals.begin(), totals.end(), 0.0);
    for (std::size_t k = 0; k < pooled.order.size(); ++k) {
      const double p = probs[pooled.order[k]];
      totals[pooled.group[k]] += uniform01(gen) < p ? 1.0 : 0.0;
    }
    const auto refit = pav_fit(totals, pooled.counts);
    for (std::size_t i = 0; i < grid.size(); ++i) draws[i][r] = refit[grid[i]];
  }
  const double lo_q = (1.0 - opt.band_level) / 2.0;
  const double hi_q = (1.0 + opt.band_level) / 2.0;
  const auto quantile_of = [](std::vector<double>& v, double q) {
    // Type-7 sample quantile.
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fit.band_probs.push_back(pooled.values[grid[i]]);
    fit.band_lower.push_back(quantile_of(draws[i], lo_q));
    fit.band_upper.push_back(quantile_of(draws[i], hi_q));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Multivariate conditional PIT through a pre-rank function
// ---------------------------------------------------------------------------

/// Maps a d-vector to a scalar. No default is provided.
using PrerankFunction = std::function<double(std::span<const double>)>;

namespace detail {

// Conditional PIT of s_y against the empirical law of `sample` above s_t.
inline std::optional<double> empirical_cpit(std::vector<double> sample, double s_y, double s_t,
                                            std::size_t min_above, bool ensemble) {
  if (!(s_y > s_t)) return std::nullopt;
  std::size_t above = 0;
  std::size_t upto_y = 0;
  for (double s : sample) {
    if (s > s_t) {
      ++above;
      upto_y += s <= s_y;
    }
  }
  if (above < min_above) {
    const std::string msg = "prerank_cpit: only " + std::to_string(above) + " of " + std::to_string(sample.size()) +
                            " pre-ranked values exceed the pre-ranked threshold";
    if (ensemble) throw Unsupported(msg + "; raw ensembles need at least " + std::to_string(min_above));
    throw DegenerateConditional(msg);
  }
  return static_cast<double>(upto_y) / static_cast<double>(above);
}

}  // namespace detail

/// Conditional PIT of prerank(y) under the law of prerank(X), X from
/// independent parametric marginals, estimated from `draws` samples of the
/// stream `seed`. Threshold is prerank(t).
inline std::optional<double> prerank_cpit(const IndependentMarginals& f, std::span<const double> y,
                                          std::span<const double> t, const PrerankFunction& prerank,
                                          std::uint64_t seed, std::size_t draws = 200000) {
  require(y.size() == f.dims() && t.size() == f.dims(), "prerank_cpit: dimension mismatch");
  require(static_cast<bool>(prerank), "prerank_cpit: a pre-rank function is required");
  const double s_y = prerank(y);
  const double s_t = prerank(t);
  if (!(s_y > s_t)) return std::nullopt;
  std::mt19937_64 gen(seed);
  std::vector<double> x(f.dims());
  std::vector<double> sample(draws);
  for (auto& s : sample) {
    f.sample_into(gen, x);
    s = prerank(x);
  }
  return detail::empirical_cpit(std::move(sample), s_y, s_t, kMinExceedingMembers, false);
}

/// Same for an ensemble: the members' pre-ranks form the distribution, and
/// fewer than `min_exceeding` members above prerank(t) is refused.
inline std::optional<double> prerank_cpit(const MvEnsemble& ens, std::span<const double> y,
                                          std::span<const double> t, const PrerankFunction& prerank,
                                          std::size_t min_exceeding = kMinExceedingMembers) {
  require(y.size() == ens.dims() && t.size() == ens.dims(), "prerank_cpit: dimension mismatch");
  require(static_cast<bool>(prerank), "prerank_cpit: a pre-rank function is required");
  std::vector<double> sample(ens.size());
  for (std::size_t k = 0; k < ens.size(); ++k) sample[k] = prerank(ens.member(k));
  return detail::empirical_cpit(std::move(sample), prerank(y), prerank(t), min_exceeding, true);
}

}  // namespace wxverif
