#include "oracles.hpp"
#include "wxverif/uniscores.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace wxverif;

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

double oracle_crps(const std::function<double(double)>& cdf, double y, std::vector<double> cuts) {
  return oracle::tw_crps_integral(cdf, [](double) { return 1.0; }, y, std::move(cuts));
}

}  // namespace

TEST(Brier, HandValues) {
  EXPECT_EQ(brier(Ensemble({0.0}), 0.0, 1.0), 0.0);
  EXPECT_EQ(brier(Ensemble({5.0}), 0.0, 1.0), 1.0);
  const Ensemble e({0, 0, 0, 5, 5, 5, 5, 5, 5, 5});
  EXPECT_NEAR(brier(e, 0.0, 1.0), 0.49, 1e-15);
  EXPECT_NEAR(brier(Normal(0, 1), 2.0, 0.0), 0.25, 1e-15);
}

TEST(CrpsEnsemble, HandValues) {
  const std::vector<double> one = {1.7};
  EXPECT_EQ(crps_ensemble(one, 1.7), 0.0);
  EXPECT_EQ(crps_ensemble(std::vector<double>{1, 1}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(crps_ensemble(std::vector<double>{0, 2}, 1.0), 0.5);
  EXPECT_THROW(crps_ensemble(std::vector<double>{}, 0.0), ContractViolation);
}

TEST(CrpsEnsemble, MatchesKernelAndIntegralOracles) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (int c = 0; c < 50; ++c) {
    std::vector<double> x(1 + c % 17);
    for (auto& v : x) v = nd(gen);
    const double y = nd(gen);
    EXPECT_NEAR(crps_ensemble(x, y), oracle::crps_kernel(x, y), 1e-12);
    if (x.size() > 1) {
      EXPECT_NEAR(crps_ensemble(x, y, {.fair = true}), oracle::crps_kernel(x, y, true), 1e-12);
    }
    EXPECT_NEAR(crps_ensemble(x, y), crps_numeric(Ensemble(x), y), 1e-8);
  }
}

TEST(CrpsNormal, ClosedFormValues) {
  EXPECT_NEAR(crps_normal(0, 1, 0), 2 * oracle::norm_pdf(0) - kInvSqrtPi, 1e-15);
  EXPECT_NEAR(crps_normal(0, 1, 0), 0.23370, 1e-5);
  EXPECT_NEAR(crps_normal(0, 1, 10), 10 - kInvSqrtPi, 1e-4);
  EXPECT_NEAR(crps_normal(3, 1e-9, 3), 0.0, 1e-8);
  EXPECT_THROW(crps_normal(0, 0, 0), ContractViolation);
}

TEST(CrpsNumeric, AgreesWithClosedFormsAndOracle) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mu(-5, 5), sd(0.1, 4), z(-4, 4);
  for (int c = 0; c < 100; ++c) {
    const double m = mu(gen), s = sd(gen), y = m + s * z(gen);
    EXPECT_NEAR(crps_numeric(Normal(m, s * s), y), crps_normal(m, s, y), 1e-6);
  }
  const std::vector<Parametric> fs = {Normal(0.5, 2.0), Logistic(-1, 0.7), StudentT(3, 0.2, 1.3)};
  for (const auto& f : fs) {
    for (double y : {-2.0, 0.4, 3.0}) {
      const double ref = oracle_crps([&](double x) { return cdf(f, x); }, y, {-5.0, 0.0, 5.0});
      EXPECT_NEAR(crps_numeric(to_forecast(f), y), ref, 1e-7) << describe(f);
      EXPECT_NEAR(crps(to_forecast(f), y), ref, 1e-7) << describe(f);
    }
  }
}

TEST(CrpsNumeric, GoldenLogisticAndDegenerateLimit) {
  // Frozen from the integral oracle; equals 2 ln 2 - 1.
  EXPECT_NEAR(crps_numeric(Logistic(0, 1), 0.0), 0.3862943611198906, 1e-9);
  EXPECT_NEAR(crps_numeric(Normal(0, 1e-12), 0.0), 0.0, 1e-6);
}

TEST(Twcrps, HandValuesAndReductions) {
  const std::vector<double> x = {0, 2};
  EXPECT_DOUBLE_EQ(twcrps(Ensemble(x), 1.0, chainings::CensorAbove{1}), 0.25);
  EXPECT_EQ(twcrps(Ensemble({-1, 0.5, 0.9}), 0.3, chainings::CensorAbove{1}), 0.0);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  for (int c = 0; c < 20; ++c) {
    std::vector<double> m(9);
    for (auto& v : m) v = nd(gen);
    const double y = nd(gen);
    EXPECT_EQ(twcrps(Ensemble(m), y, chainings::Identity{}), crps_ensemble(m, y));
  }
}

TEST(Twcrps, ParametricMatchesWeightedIntegralOracle) {
  const std::vector<Parametric> fs = {Normal(0.2, 1.5), Logistic(0.5, 0.6), StudentT(4, -0.3, 1.0)};
  const std::vector<ChainingFunction> vs = {chainings::CensorAbove{1.0}, chainings::GaussPdfChain{0.5, 1.0},
                                            chainings::GaussCdfChain{1.0, 1.0}, chainings::TailChain{0, 1.5},
                                            chainings::OneMinusGaussCdfChain{-0.5, 0.8}};
  for (const auto& f : fs) {
    for (const auto& v : vs) {
      const WeightFunction w = *chaining_weight(v);
      for (double y : {-1.2, 0.7, 2.5}) {
        const double ref = oracle::tw_crps_integral([&](double z) { return cdf(f, z); },
                                                    [&](double z) { return eval_weight(w, z); }, y, {-3.0, 1.0, 3.0});
        EXPECT_NEAR(twcrps(to_forecast(f), y, v), ref, 1e-7) << describe(f) << " " << describe(v);
      }
    }
  }
}

TEST(Owcrps, ReductionsAndErrors) {
  const Forecast f = Normal(0.3, 2.0);
  EXPECT_EQ(owcrps(f, -1.0, weights::IndicatorAbove{0}), 0.0);
  EXPECT_NEAR(owcrps(f, 0.9, weights::Constant{}), crps_normal(0.3, std::sqrt(2.0), 0.9), 1e-8);
  EXPECT_THROW(owcrps(Normal(0, 1), 61.0, weights::IndicatorAbove{60}), WeightedMassZero);
  EXPECT_THROW(owcrps(Ensemble({1, 2, 3}), 2.0, weights::IndicatorAbove{0}), Unsupported);
}

TEST(Owcrps, TruncatedNormalAgainstOracle) {
  // F_w for w = 1{z > 0} is the normal truncated below at 0.
  const auto trunc = [](double z) { return z <= 0 ? 0.0 : (oracle::norm_cdf(z) - 0.5) / 0.5; };
  const double ref = oracle_crps(trunc, 1.0, {0.0, 8.0});
  EXPECT_NEAR(owcrps(Normal(0, 1), 1.0, weights::IndicatorAbove{0}), ref, 1e-8);
  // Smooth weight: F_w from its own oracle integral, then the CRPS integral.
  const weights::GaussCdf w{1.0, 0.7};
  const Normal f(0.5, 1.2);
  const auto dens = [&](double z) { return eval_weight(w, z) * f.pdf(z); };
  const double mass = oracle::integrate_line(dens, {-3, 0.5, 4}, 400);
  const auto fw = [&](double z) { return oracle::integrate(dens, -12.0, z, 200) / mass; };
  const double y = 1.4;
  const double ref2 = eval_weight(w, y) * (oracle::integrate([&](double z) { const double p = fw(z); return p * p; }, -12.0, y, 60) +
                                           oracle::integrate([&](double z) { const double q = 1 - fw(z); return q * q; }, y, 14.0, 60));
  EXPECT_NEAR(owcrps(f, y, w), ref2, 1e-7);
}

TEST(Owcrps, ThresholdDeepInLowerTail) {
  // Eight standard deviations below the mean the weight keeps all the mass,
  // so owCRPS is the CRPS; this once took seconds through rounding noise.
  const auto t0 = std::chrono::steady_clock::now();
  const Forecast f = Normal(29.47, 0.3);
  for (double y : {26.55, 29.0, 31.0}) {
    EXPECT_NEAR(owcrps(f, y, weights::IndicatorAbove{25.0}), crps_normal(29.47, std::sqrt(0.3), y), 1e-9);
    EXPECT_NEAR(owcrps_bs(f, y, 25.0), crps_normal(29.47, std::sqrt(0.3), y), 1e-9);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0.5);
}

TEST(OwcrpsBs, HandValuesAndBrierTerm) {
  EXPECT_NEAR(owcrps_bs(Normal(0, 1), -1.0, 0.0), 0.25, 1e-15);
  for (double y : {-3.0, -0.1, 0.0}) EXPECT_DOUBLE_EQ(owcrps_bs(Normal(0.4, 1.5), y, 0.0), brier(Normal(0.4, 1.5), y, 0.0));
  // Entirely above t: the Brier term vanishes and only owCRPS remains.
  EXPECT_NEAR(owcrps_bs(Normal(50, 1), 51.0, 0.0), owcrps(Normal(50, 1), 51.0, weights::IndicatorAbove{0}), 1e-12);
  const double y = 1.3;
  EXPECT_NEAR(owcrps_bs(Normal(0, 1), y, 0.5),
              owcrps(Normal(0, 1), y, weights::IndicatorAbove{0.5}) + brier(Normal(0, 1), y, 0.5), 1e-12);
  EXPECT_THROW(owcrps_bs(Ensemble({1, 2}), 1.0, 0.0), Unsupported);
}

TEST(Vrcrps, HandValueAndReductions) {
  const std::vector<double> x = {0, 2};
  EXPECT_DOUBLE_EQ(vrcrps(Ensemble(x), 1.0, weights::IndicatorAbove{1}, 0.0), 0.5);
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd;
  for (int c = 0; c < 200; ++c) {
    std::vector<double> m(2 + c % 11);
    for (auto& v : m) v = nd(gen);
    const double y = nd(gen), t = 0.5 * nd(gen);
    EXPECT_NEAR(vrcrps(Ensemble(m), y, weights::Constant{}, nd(gen)), crps_ensemble(m, y), 1e-12);
    EXPECT_NEAR(vrcrps(Ensemble(m), y, weights::IndicatorAbove{t}, t), twcrps(Ensemble(m), y, chainings::CensorAbove{t}),
                1e-12);
    EXPECT_NEAR(vrcrps(Ensemble(m), y, weights::IndicatorAbove{t}, t, {}, {.fair = true}),
                twcrps(Ensemble(m), y, chainings::CensorAbove{t}, {}, {.fair = true}), 1e-12);
  }
}

TEST(Vrcrps, EnsembleMatchesPairSumOracle) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  const auto rho = [](double a, double b) { return std::abs(a - b); };
  const WeightFunction w = weights::GaussCdf{0.2, 0.8};
  for (int c = 0; c < 30; ++c) {
    std::vector<double> m(3 + c % 7), wx;
    for (auto& v : m) { v = nd(gen); wx.push_back(eval_weight(w, v)); }
    const double y = nd(gen), x0 = nd(gen);
    for (bool fair : {false, true}) {
      EXPECT_NEAR(vrcrps(Ensemble(m), y, w, x0, {}, {.fair = fair}),
                  oracle::vr_kernel(m, y, x0, wx, eval_weight(w, y), rho, fair), 1e-12);
    }
  }
}

TEST(Vrcrps, ParametricMatchesDirectExpectations) {
  const Normal f(0.3, 1.1);
  const weights::GaussPdf w{0.8, 1.0};
  const double x0 = -0.4;
  const auto g = [&](double z) { return eval_weight(w, z) * f.pdf(z); };
  const double mass = oracle::integrate(g, -12, 12, 200);
  const double spread = oracle::pair_abs_moment(g, -12, 12, 120);
  const auto abs_moment = [&](double a) {
    return oracle::integrate([&](double z) { return std::abs(z - a) * g(z); }, -12, a, 100) +
           oracle::integrate([&](double z) { return std::abs(z - a) * g(z); }, a, 12, 100);
  };
  for (double y : {-1.0, 0.5, 2.0}) {
    const double wy = eval_weight(w, y);
    const double ref = abs_moment(y) * wy - 0.5 * spread + (abs_moment(x0) - std::abs(y - x0) * wy) * (mass - wy);
    EXPECT_NEAR(vrcrps(f, y, w, x0), ref, 1e-8);
  }
  // Indicator weight with x0 = t reproduces twCRPS on parametric forecasts too.
  for (double y : {-0.5, 1.7}) {
    EXPECT_NEAR(vrcrps(Logistic(0.2, 0.9), y, weights::IndicatorAbove{0.6}, 0.6),
                twcrps(Logistic(0.2, 0.9), y, chainings::CensorAbove{0.6}), 1e-8);
  }
}

TEST(Decomposition, ResidualsVanish) {
  EXPECT_NEAR(twcrps_decomposition_check(Normal(0, 1), 1.0, 0.0), 0.0, 1e-8);
  // y <= t: twCRPS is the upper tail integral of (F - 1)^2 alone.
  const double tail = oracle::integrate_line([](double z) { const double q = z < 0 ? 0.0 : 1 - oracle::norm_cdf(z); return q * q; },
                                             {0.0, 6.0}, 200);
  EXPECT_NEAR(twcrps(Normal(0, 1), -0.5, chainings::CensorAbove{0}), tail, 1e-8);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-2, 2), s(0.3, 2.5);
  for (int c = 0; c < 50; ++c) {
    const double mu = u(gen), sd = s(gen), t = mu + sd * u(gen), y = mu + sd * 1.5 * u(gen);
    EXPECT_LT(std::abs(twcrps_decomposition_check(Normal(mu, sd * sd), y, t)), 1e-8) << mu << " " << sd << " " << t << " " << y;
  }
}

TEST(Batch, ManyEqualsSingle) {
  const Parametric f = Logistic(0.1, 0.8);
  const std::vector<double> ys = {-3.0, -0.2, 0.1, 0.1, 0.9, 4.0};
  const auto tw = twcrps_many(f, ys, chainings::GaussCdfChain{0.5, 1.0});
  const auto ob = owcrps_bs_many(f, ys, 0.5);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    EXPECT_NEAR(tw[k], twcrps(to_forecast(f), ys[k], chainings::GaussCdfChain{0.5, 1.0}), 1e-10);
    EXPECT_NEAR(ob[k], owcrps_bs(to_forecast(f), ys[k], 0.5), 1e-10);
    EXPECT_GE(tw[k], 0.0);
  }
}
