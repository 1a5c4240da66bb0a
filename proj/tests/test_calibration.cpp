#include "oracles.hpp"
#include "wxverif/calibration.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

using namespace wxverif;

namespace {

// Isotonic fit by the max-min formula over block averages; O(n^3), fine for
// small inputs and independent of pool-adjacent-violators.
std::vector<double> isotonic_minmax(const std::vector<double>& totals, const std::vector<double>& counts) {
  const std::size_t n = totals.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j <= i; ++j) {
      double worst = 2.0;
      for (std::size_t k = i; k < n; ++k) {
        double t = 0.0, c = 0.0;
        for (std::size_t q = j; q <= k; ++q) { t += totals[q]; c += counts[q]; }
        worst = std::min(worst, t / c);
      }
      best = std::max(best, worst);
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

TEST(Pit, Values) {
  EXPECT_DOUBLE_EQ(pit(Normal(0, 1), 0.0), 0.5);
  EXPECT_EQ(pit(Normal(0, 1), -INFINITY), 0.0);
  EXPECT_EQ(pit(Normal(0, 1), INFINITY), 1.0);
  EXPECT_NEAR(pit(Logistic(0, 1), std::log(3.0)), 0.75, 1e-15);
}

TEST(Rank, ExtremesAndTies) {
  const std::vector<double> m = {1, 2, 3, 4};
  EXPECT_EQ(rank(m, 0.0, 1), 1);
  EXPECT_EQ(rank(m, 9.0, 1), 5);
  EXPECT_EQ(rank(m, 2.5, 1), 3);
  // Two members equal to y: the three ranks are equally likely over seeds.
  const std::vector<double> tie = {0.0, 0.0};
  std::map<int, int> seen;
  const int n = 30000;
  for (int s = 0; s < n; ++s) ++seen[rank(tie, 0.0, static_cast<std::uint64_t>(s))];
  ASSERT_EQ(seen.size(), 3u);
  for (const auto& [r, c] : seen) EXPECT_NEAR(c / double(n), 1.0 / 3.0, 4.0 / std::sqrt(double(n))) << r;
  EXPECT_EQ(rank(tie, 0.0, 99), rank(tie, 0.0, 99));
}

TEST(Rank, CalibratedEnsembleIsFlat) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  const std::size_t m = 9;
  const int n = 20000;
  std::vector<int> ranks;
  for (int c = 0; c < n; ++c) {
    std::vector<double> x(m);
    for (auto& v : x) v = nd(gen);
    ranks.push_back(rank(x, nd(gen), gen));
  }
  const auto h = rank_histogram(ranks, m);
  ASSERT_EQ(h.bins(), m + 1);
  for (double f : h.frequencies) EXPECT_NEAR(f, 1.0 / (m + 1), 4.0 / std::sqrt(double(n)));
}

TEST(ReliabilityIndex, HandValues) {
  EXPECT_EQ(summarize_counts({5, 5, 5, 5}).reliability_index, 0.0);
  for (std::size_t k : {2u, 5u, 20u}) {
    std::vector<std::size_t> c(k, 0);
    c[0] = 10;
    EXPECT_NEAR(summarize_counts(c).reliability_index, 2.0 * (k - 1) / k, 1e-15);
  }
  EXPECT_NEAR(summarize_counts({3, 1}).reliability_index, 0.5, 1e-15);
}

TEST(PitHistogram, BinsAndFrequencies) {
  const std::vector<double> u = {0.0, 0.24, 0.25, 0.5, 0.99, 1.0};
  const auto h = pit_histogram(u, 4);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1, 1, 2}));
  double s = 0.0;
  for (double f : h.frequencies) s += f;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_THROW(pit_histogram(std::vector<double>{1.5}), ContractViolation);
}

TEST(Cpit, Values) {
  EXPECT_FALSE(cpit(Normal(0, 1), 0.0, 0.0).has_value());
  EXPECT_NEAR(*cpit(Normal(0, 1), 0.8416212335729143, 0.0), 0.6, 1e-12);  // y = Phi^-1(0.8)
  EXPECT_EQ(*cpit(Normal(0.3, 2.0), 1.1, -INFINITY), pit(Normal(0.3, 2.0), 1.1));
  EXPECT_THROW(cpit(Normal(0, 1), 41.0, 40.0), DegenerateConditional);
  // Upper-tail branch keeps precision where F(t) is close to one.
  const double u = *cpit(Normal(0, 1), 7.0, 6.0);
  const double ref = (std::erfc(6.0 / std::sqrt(2.0)) - std::erfc(7.0 / std::sqrt(2.0))) / std::erfc(6.0 / std::sqrt(2.0));
  EXPECT_NEAR(u, ref, 1e-12);
}

TEST(Cpit, EnsembleNeedsEnoughExceedingMembers) {
  std::vector<double> m(20);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<double>(i);
  EXPECT_FALSE(cpit_ensemble(m, 5.0, 10.0).has_value());
  EXPECT_TRUE(cpit_ensemble(m, 15.0, 9.0).has_value());  // 10 members above 9
  EXPECT_THROW(cpit_ensemble(m, 19.0, 10.0), Unsupported);  // only 9 above 10
}

TEST(PitEcdf, StepsAndDeviation) {
  const auto one = pit_ecdf(std::vector<double>{0.5});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].value, 0.5);
  EXPECT_EQ(one[0].cumulative, 1.0);
  const int n = 99;
  std::vector<double> grid;
  for (int i = 1; i <= n; ++i) grid.push_back(i / double(n + 1));
  EXPECT_LE(ecdf_max_deviation(pit_ecdf(grid)), 1.0 / (n + 1) + 1e-12);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u;
  std::vector<double> draws(100000);
  for (auto& v : draws) v = u(gen);
  EXPECT_LT(ecdf_max_deviation(pit_ecdf(draws)), 1.63 / std::sqrt(1e5));
  EXPECT_THROW(pit_ecdf(std::vector<double>{}), ContractViolation);
}

TEST(Corp, HandValues) {
  const std::vector<double> perfect_p = {0, 0, 0, 1, 1};
  const std::vector<int> perfect_o = {0, 0, 0, 1, 1};
  const auto a = corp_reliability(perfect_p, perfect_o, {.resamples = 0});
  EXPECT_EQ(a.cep_at(0.0), 0.0);
  EXPECT_EQ(a.cep_at(1.0), 1.0);
  const std::vector<double> half_p(10, 0.5);
  const std::vector<int> half_o = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(corp_reliability(half_p, half_o, {.resamples = 0}).cep_at(0.5), 0.5);
  const std::vector<double> p = {0.2, 0.8};
  const std::vector<int> o = {1, 0};
  const auto f = corp_reliability(p, o, {.resamples = 0});
  EXPECT_EQ(f.cep, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(corp_reliability(p, std::vector<int>{1}), ContractViolation);
}

TEST(Corp, PavMatchesMinMaxOracleAndIsMonotone) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> u;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 2 + c % 15;
    std::vector<double> totals(n), counts(n);
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = 1 + coin(gen) + coin(gen);
      totals[i] = std::round(u(gen) * counts[i]);
    }
    const auto fit = pav_fit(totals, counts);
    const auto ref = isotonic_minmax(totals, counts);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fit[i], ref[i], 1e-12);
    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(fit[i - 1], fit[i]);
  }
}

TEST(Corp, BandCoversCalibratedForecasts) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u;
  const std::size_t n = 4000;
  std::vector<double> p(n);
  std::vector<int> o(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::round(u(gen) * 20) / 20;
    o[i] = u(gen) < p[i];
  }
  const auto fit = corp_reliability(p, o, {.band_level = 0.99, .resamples = 300, .seed = 3, .band_points = 200});
  ASSERT_EQ(fit.band_probs.size(), 21u);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < fit.band_probs.size(); ++i) {
    EXPECT_LE(fit.band_lower[i], fit.band_upper[i]);
    const double cep = fit.cep_at(fit.band_probs[i]);
    inside += cep >= fit.band_lower[i] - 1e-12 && cep <= fit.band_upper[i] + 1e-12;
  }
  EXPECT_GE(inside, 19u);
  // Same seed, same band.
  const auto again = corp_reliability(p, o, {.band_level = 0.99, .resamples = 300, .seed = 3, .band_points = 200});
  EXPECT_EQ(fit.band_lower, again.band_lower);
}

TEST(PrerankCpit, IdentityReducesToCpit) {
  const IndependentMarginals f{{Normal(0.2, 1.5)}};
  const std::vector<double> y = {1.4}, t = {0.5};
  const auto id = [](std::span<const double> v) { return v[0]; };
  const double mc = *prerank_cpit(f, y, t, id, 5, 400000);
  const double exact = *cpit(Normal(0.2, 1.5), 1.4, 0.5);
  const double above = 400000 * sf(Normal(0.2, 1.5), 0.5);
  EXPECT_NEAR(mc, exact, 3 * std::sqrt(exact * (1 - exact) / above));
  EXPECT_FALSE(prerank_cpit(f, std::vector<double>{0.1}, t, id, 5, 1000).has_value());
}

TEST(PrerankCpit, MeanPrerankMatchesClosedForm) {
  // The mean of independent normals is normal with the averaged mean and
  // variance sum/d^2, which gives an exact conditional PIT to compare to.
  const IndependentMarginals f{{Normal(0.0, 1.0), Normal(1.0, 2.0), Normal(-0.5, 0.5)}};
  const auto mean = [](std::span<const double> v) { return (v[0] + v[1] + v[2]) / 3.0; };
  const std::vector<double> y = {1.0, 2.0, 0.5}, t = {0.3, 0.3, 0.3};
  const Normal agg((0.0 + 1.0 - 0.5) / 3.0, (1.0 + 2.0 + 0.5) / 9.0);
  const double exact = *cpit(agg, mean(y), mean(t));
  const std::size_t n = 1000000;
  const double mc = *prerank_cpit(f, y, t, mean, 11, n);
  const double above = n * sf(agg, mean(t));
  EXPECT_NEAR(mc, exact, 3 * std::sqrt(exact * (1 - exact) / above));
}

TEST(PrerankCpit, RawEnsembleIsRefusedWhenTooFewExceed) {
  std::vector<std::vector<double>> members;
  for (int k = 0; k < 20; ++k) members.push_back({double(k), double(k)});
  const auto ens = MvEnsemble::from_members(members);
  const auto sum = [](std::span<const double> v) { return v[0] + v[1]; };
  const std::vector<double> t = {9.5, 9.5};
  EXPECT_TRUE(prerank_cpit(ens, std::vector<double>{15, 15}, t, sum).has_value());
  const std::vector<double> high = {15.5, 15.5};
  EXPECT_THROW(prerank_cpit(ens, std::vector<double>{18, 18}, high, sum), Unsupported);
  EXPECT_FALSE(prerank_cpit(ens, std::vector<double>{0, 0}, t, sum).has_value());
}
