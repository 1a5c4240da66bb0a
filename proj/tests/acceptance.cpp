// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
//   acceptance <path to wxverif_cli> <scratch directory>

#include "oracles.hpp"
#include "wxverif/io/run.hpp"
#include "wxverif/mvscores.hpp"
#include "wxverif/postprocess.hpp"
#include "wxverif/synthlab.hpp"
#include "wxverif/uniscores.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace wxverif;
namespace fs = std::filesystem;

namespace {

// Collects the first few failed conditions of one criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok()) return notes_;
    return std::to_string(failures_) + " failed: " + detail_ + (failures_ > 5 ? "; ..." : "");
  }

 private:
  int failures_ = 0;
  std::string detail_;
  std::string notes_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void fig1_shape(Check& c) {
  const double t = 1.0;
  const auto below = run_fig1_curves(linear_grid(-4.0, t - 1e-9, 101), t);
  double dev_tw = 0, dev_ow = 0, dev_vr = 0;
  for (const auto& r : below) {
    dev_tw = std::max(dev_tw, std::abs(r.twcrps - below.front().twcrps));
    dev_ow = std::max(dev_ow, std::abs(r.owcrps - below.front().owcrps));
    dev_vr = std::max(dev_vr, std::abs(r.vrcrps - below.front().vrcrps));
  }
  c.require(dev_tw < 1e-8, "twCRPS varies below t by " + num(dev_tw));
  c.require(dev_ow < 1e-8, "owCRPS varies below t by " + num(dev_ow));
  c.require(dev_vr < 1e-8, "vrCRPS varies below t by " + num(dev_vr));
  const std::vector<double> around = {t - 1e-9, t + 1e-9};
  const auto at = run_fig1_curves(around, t);
  const double gap = std::abs(at[1].twcrps - at[0].twcrps);
  const double ow_jump = at[1].owcrps - at[0].owcrps;
  const double vr_jump = at[1].vrcrps - at[0].vrcrps;
  c.require(gap < 1e-6, "twCRPS gap at t " + num(gap));
  c.require(ow_jump > 0, "owCRPS jump " + num(ow_jump));
  c.require(vr_jump > 0, "vrCRPS jump " + num(vr_jump));
  c.note("max dev " + num(std::max({dev_tw, dev_ow, dev_vr})) + ", tw gap " + num(gap) + ", ow jump " +
         num(ow_jump) + ", vr jump " + num(vr_jump));
}

void fig2_ideal(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_fig2_ideal(100000, 1.0 / 3.0, 1.0, 0);
  const double secs = seconds_since(t0);
  c.require(r.pit.bins() == 20, "bins " + std::to_string(r.pit.bins()));
  c.require(r.pit.reliability_index < 0.05, "PIT RI " + num(r.pit.reliability_index));
  c.require(r.cpit.reliability_index < 0.15, "cPIT RI " + num(r.cpit.reliability_index));
  for (std::size_t b = 1; b < r.restricted_pit.bins(); ++b) {
    c.require(r.restricted_pit.frequencies[b] > r.restricted_pit.frequencies[b - 1],
              "restricted PIT not increasing at bin " + std::to_string(b));
  }
  c.require(secs < 60, "runtime " + num(secs) + " s");
  c.note("PIT RI " + num(r.pit.reliability_index) + ", cPIT RI " + num(r.cpit.reliability_index) + ", " +
         num(secs) + " s");
}

void fig3_tails(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_fig3_tails(1000000, 2.0, 7);
  const double secs = seconds_since(t0);
  c.require(r.exceedances >= 20000 && r.exceedances <= 30000, "exceedances " + std::to_string(r.exceedances));
  for (const auto& f : r.forecasters) {
    const double first = f.cpit.frequencies.front(), last = f.cpit.frequencies.back();
    if (f.name == "logistic") c.require(f.cpit.reliability_index < 0.2, "logistic cPIT RI " + num(f.cpit.reliability_index));
    if (f.name == "normal") c.require(last > first, "normal cPIT not right-skewed");
    if (f.name == "student_t5") c.require(first > last, "student-t cPIT not left-skewed");
    c.note(f.name + " RI " + num(f.cpit.reliability_index));
  }
  c.require(r.forecasters.size() == 3, "expected three forecasters");
  c.require(secs < 300, "runtime " + num(secs) + " s");
  c.note(std::to_string(r.exceedances) + " exceedances, " + num(secs) + " s");
}

void propriety(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProprietyOptions o;
  o.pairs = 20;
  o.univariate_draws = 100000;
  o.multivariate_draws = 20000;
  const auto rows = run_propriety_mc(o);
  const double secs = seconds_since(t0);
  std::map<std::string, std::size_t> pairs_per_score;
  for (const auto& r : rows) {
    ++pairs_per_score[r.score];
    c.require(r.mean_truth <= r.mean_alt + 2 * r.se, r.score + " on " + r.pair + ": " + num(r.mean_truth) + " > " +
                                                          num(r.mean_alt) + " + 2*" + num(r.se));
  }
  for (const auto& [name, count] : pairs_per_score) {
    c.require(count >= 20, name + " has " + std::to_string(count) + " pairs");
  }
  // Names carry their parameters as "[weight]" or "_p<order>".
  const auto covered = [&](const std::string& need) {
    return std::any_of(pairs_per_score.begin(), pairs_per_score.end(), [&](const auto& kv) {
      const std::string& n = kv.first;
      return n == need || n.rfind(need + "[", 0) == 0 || n.rfind(need + "_p", 0) == 0;
    });
  };
  for (const char* need : {"crps", "twcrps", "owcrps_bs", "vrcrps", "es", "vs", "tw_es", "tw_vs", "vr_es"}) {
    c.require(covered(need), std::string("score missing: ") + need);
  }
  c.require(secs < 600, "runtime " + num(secs) + " s");
  c.note(std::to_string(pairs_per_score.size()) + " scores x 20 pairs, " + num(secs) + " s");
}

void impropriety(Check& c) {
  const auto r = run_impropriety_demo(0.5, 100000, 0);
  const double naive_margin = r.naive.mean_truth - r.naive.mean_alt;
  const double tw_margin = r.threshold_weighted.mean_alt - r.threshold_weighted.mean_truth;
  c.require(naive_margin > 2 * r.naive.se, "naive margin " + num(naive_margin) + " vs 2SE " + num(2 * r.naive.se));
  c.require(tw_margin > 2 * r.threshold_weighted.se,
            "twCRPS margin " + num(tw_margin) + " vs 2SE " + num(2 * r.threshold_weighted.se));
  c.note("naive prefers truncation by " + num(naive_margin / r.naive.se) + " SE, twCRPS prefers truth by " +
         num(tw_margin / r.threshold_weighted.se) + " SE");
}

void identities(Check& c) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> msize(2, 60);
  double worst_vr = 0, worst_es = 0, worst_id = 0;
  for (int k = 0; k < 1000; ++k) {
    const double scale = 0.2 + 3 * unif(gen);
    std::vector<double> x(msize(gen));
    for (auto& v : x) v = scale * nd(gen);
    const double y = scale * 1.5 * nd(gen);
    const double t = nd(gen);
    const double vr = vrcrps_ensemble(x, y, weights::IndicatorAbove{t}, t);
    const double tw = twcrps_ensemble(x, y, chainings::CensorAbove{t});
    worst_vr = std::max(worst_vr, std::abs(vr - tw));

    std::vector<std::vector<double>> as_points;
    for (double v : x) as_points.push_back({v});
    const std::vector<double> y1 = {y};
    const auto ens1 = MvEnsemble::from_members(as_points);
    worst_es = std::max(worst_es, std::abs(energy_score(ens1, y1) - crps_ensemble(x, y)));

    worst_id = std::max(worst_id, std::abs(twcrps_ensemble(x, y, chainings::Identity{}) - crps_ensemble(x, y)));
    if (k % 10 == 0) {
      std::vector<std::vector<double>> pts(x.size(), std::vector<double>(3));
      for (auto& p : pts)
        for (auto& v : p) v = scale * nd(gen);
      const auto ens3 = MvEnsemble::from_members(pts);
      const std::vector<double> y3 = {nd(gen), nd(gen), nd(gen)};
      worst_id = std::max(worst_id, std::abs(tw_energy_score(ens3, y3, chainings::Identity{}) - energy_score(ens3, y3)));
      worst_id = std::max(worst_id,
                          std::abs(tw_variogram_score(ens3, y3, chainings::Identity{}) - variogram_score(ens3, y3)));
    }
  }
  c.require(worst_vr < 1e-12, "vrCRPS vs twCRPS " + num(worst_vr));
  c.require(worst_es < 1e-12, "ES(d=1) vs CRPS " + num(worst_es));
  c.require(worst_id < 1e-12, "identity chaining " + num(worst_id));

  double worst_dec = 0;
  for (int k = 0; k < 50; ++k) {
    const double mu = 2 * nd(gen), sigma = 0.3 + 2 * unif(gen);
    const double y = mu + 2 * sigma * nd(gen), t = mu + sigma * nd(gen);
    worst_dec = std::max(worst_dec, std::abs(twcrps_decomposition_check(Normal(mu, sigma), y, t)));
  }
  c.require(worst_dec < 1e-8, "decomposition residual " + num(worst_dec));

  double worst_q = 0;
  for (int k = 0; k < 100; ++k) {
    const double mu = 3 * nd(gen), sigma = 0.1 + 3 * unif(gen);
    const double y = mu + 2 * sigma * nd(gen);
    const auto f = [&](double z) { return oracle::norm_cdf((z - mu) / sigma); };
    const auto integrand = [&](double z) {
      const double d = f(z) - (z >= y ? 1.0 : 0.0);
      return d * d;
    };
    std::vector<double> cuts = {mu - 12 * sigma, mu + 12 * sigma, y};
    std::sort(cuts.begin(), cuts.end());
    cuts.front() = std::min(cuts.front(), y - 1.0);
    cuts.back() = std::max(cuts.back(), y + 1.0);
    const double ref = oracle::integrate_line(integrand, cuts, 200);
    worst_q = std::max(worst_q, std::abs(crps_normal(mu, sigma, y) - ref));
  }
  c.require(worst_q < 1e-6, "crps_normal vs quadrature " + num(worst_q));
  c.note("vr-tw " + num(worst_vr) + ", ES-CRPS " + num(worst_es) + ", identity " + num(worst_id) + ", decomposition " +
         num(worst_dec) + ", closed form " + num(worst_q));
}

void heat_levels(Check& c) {
  std::size_t cells = 0;
  std::array<std::size_t, 5> per_level{};
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; b <= 20; ++b) {
      for (int d = 0; d <= 20; ++d) {
        const std::vector<double> v = {20 + 0.5 * a, 20 + 0.5 * b, 20 + 0.5 * d};
        int warm = 0, hot = 0;
        for (double x : v) {
          warm += x >= 25.0;
          hot += x >= 27.0;
        }
        // One predicate per level, straight from the criteria.
        const bool l1 = warm == 0;
        const bool l2 = warm == 1 || warm == 2;
        const bool l3 = warm == 3 && hot < 3;
        const bool l4 = hot == 3;
        const int matches = l1 + l2 + l3 + l4;
        const int expected = l1 ? 1 : l2 ? 2 : l3 ? 3 : 4;
        const int got = to_int(classify_heat_level(v));
        c.require(matches == 1, "criteria overlap or gap at (" + num(v[0]) + "," + num(v[1]) + "," + num(v[2]) + ")");
        c.require(got == expected, "level " + std::to_string(got) + " at (" + num(v[0]) + "," + num(v[1]) + "," +
                                       num(v[2]) + ")");
        ++per_level[static_cast<std::size_t>(got)];
        ++cells;
      }
    }
  }
  const auto lvl = [](double a, double b, double d) {
    const std::vector<double> v = {a, b, d};
    return to_int(classify_heat_level(v));
  };
  c.require(lvl(24, 24, 24) == 1, "row (24,24,24)");
  c.require(lvl(26, 24, 26) == 2, "row (26,24,26)");
  c.require(lvl(26, 26, 25) == 3, "row (26,26,25)");
  c.require(lvl(27.5, 28, 27) == 4, "row (27.5,28,27)");
  c.note(std::to_string(cells) + " cells, levels " + std::to_string(per_level[1]) + "/" +
         std::to_string(per_level[2]) + "/" + std::to_string(per_level[3]) + "/" + std::to_string(per_level[4]));
}

void emos_pipeline(Check& c) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::vector<TrainingCase> train, test;
  std::vector<std::vector<double>> test_members;
  for (int k = 0; k < 2000; ++k) {
    const double xbar = 15 + 5 * nd(gen);
    std::vector<double> m(21);
    for (auto& v : m) v = xbar + 0.5 * nd(gen);
    const auto s = smooth_ensemble(m);
    // Bias of +1 and an observation spread well beyond the members'.
    const TrainingCase tc{s.mean(), s.variance(), 0, 0, xbar + 1 + std::sqrt(2.0) * nd(gen)};
    if (k < 1000) {
      train.push_back(tc);
    } else {
      test.push_back(tc);
      test_members.push_back(m);
    }
  }
  const auto fit = fit_emos(train);
  double raw = 0.0;
  for (std::size_t k = 0; k < test.size(); ++k) raw += crps_ensemble(test_members[k], test[k].obs);
  raw /= static_cast<double>(test.size());
  const double post = emos_mean_crps(fit.params, test);
  c.require(post < raw, "EMOS " + num(post) + " vs raw " + num(raw));

  // Recovery at n = 2000.
  const double b0 = 1.0, b1 = 0.9, b2 = 0.004, b3 = -0.02, s0 = 0.5, s1 = 0.8;
  std::mt19937_64 g2(17);
  std::normal_distribution<double> mean_dist(10.0, 8.0);
  std::uniform_real_distribution<double> var_dist(0.2, 3.0), mhd_dist(-300, 300), tpi_dist(-60, 60);
  std::vector<TrainingCase> data(2000);
  for (auto& d : data) {
    d.ens_mean = mean_dist(g2);
    d.ens_var = var_dist(g2);
    d.mhd = mhd_dist(g2);
    d.tpi = tpi_dist(g2);
    d.obs = b0 + b1 * d.ens_mean + b2 * d.mhd + b3 * d.tpi + std::sqrt(s0 + s1 * d.ens_var) * nd(g2);
  }
  const auto rec = fit_emos(data).params;
  c.require(std::abs(rec.intercept - b0) <= 0.1, "intercept " + num(rec.intercept));
  c.require(std::abs(rec.mean_slope - b1) <= 0.1, "mean slope " + num(rec.mean_slope));
  c.require(std::abs(rec.mhd_slope - b2) <= 0.1, "mhd slope " + num(rec.mhd_slope));
  c.require(std::abs(rec.tpi_slope - b3) <= 0.1, "tpi slope " + num(rec.tpi_slope));
  const double sd0 = std::sqrt(rec.var_intercept), sd1 = std::sqrt(rec.var_slope);
  c.require(std::abs(sd0 / std::sqrt(s0) - 1) <= 0.2, "sqrt var intercept " + num(sd0));
  c.require(std::abs(sd1 / std::sqrt(s1) - 1) <= 0.2, "sqrt var slope " + num(sd1));

  // ECC on tied, mixed-family raw ensembles.
  const std::vector<Parametric> marg = {Normal(1, 2), Logistic(0, 1), StudentT(5, 2, 0.5)};
  bool quantiles_exact = true, order_exact = true;
  for (int k = 0; k < 50; ++k) {
    std::vector<std::vector<double>> members(21, std::vector<double>(3));
    for (auto& r : members)
      for (auto& v : r) v = std::round(3 * nd(gen));
    const auto rawens = MvEnsemble::from_members(members);
    const auto out = ecc_reorder(marg, rawens);
    const auto levels = ecc_levels(21);
    for (std::size_t i = 0; i < 3; ++i) {
      auto sorted = out.row(i);
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t q = 0; q < 21; ++q) quantiles_exact &= sorted[q] == quantile(marg[i], levels[q]);
      for (std::size_t a = 0; a < 21; ++a) {
        for (std::size_t b = 0; b < 21; ++b) {
          const bool before = rawens(i, a) < rawens(i, b) || (rawens(i, a) == rawens(i, b) && a < b);
          if (before) order_exact &= out(i, a) < out(i, b);
        }
      }
    }
  }
  c.require(quantiles_exact, "ECC marginal quantiles changed");
  c.require(order_exact, "ECC rank order changed");
  c.note("CRPS raw " + num(raw) + " -> EMOS " + num(post) + ", recovered (" + num(rec.intercept) + ", " +
         num(rec.mean_slope) + ", " + num(rec.mhd_slope) + ", " + num(rec.tpi_slope) + "; " + num(rec.var_intercept) +
         ", " + num(rec.var_slope) + ")");
}

void skill_spot(Check& c) {
  const auto s = io::skill_score(0.88, 1.05);
  c.require(s.has_value() && std::abs(*s - 0.162) <= 1e-3, "skill " + (s ? num(*s) : std::string("undefined")));
  if (s) c.note("skill " + num(*s));
}

// ---------------------------------------------------------------------------
// Reproducibility through the command line

std::string two_digits(std::size_t v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string archive_csv(std::size_t stations, std::size_t days, double bias, double spread, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::ostringstream os;
  os << "station_id,init_date,lead_time";
  for (int k = 1; k <= 11; ++k) os << ",m" << k;
  os << ",obs\n";
  for (std::size_t s = 0; s < stations; ++s) {
    for (std::size_t d = 0; d < days; ++d) {
      // Sixty days from 1 June.
      const std::string date = d < 30 ? "2022-06-" + two_digits(d + 1) : "2022-07-" + two_digits(d - 29);
      for (int lead = 1; lead <= 3; ++lead) {
        const double truth = 24 + 3 * std::sin(0.2 * static_cast<double>(d + lead)) + 2 * nd(gen);
        os << "ST" << s << "," << date << "," << lead;
        for (int k = 0; k < 11; ++k) os << "," << io::format_double(truth + bias + spread * nd(gen));
        os << "," << io::format_double(truth + nd(gen)) << "\n";
      }
    }
  }
  return os.str();
}

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::exists(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

void reproducibility(Check& c, const std::string& cli, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const auto fc = (work / "forecast.csv").string();
  const auto ref = (work / "reference.csv").string();
  const auto st = (work / "stations.csv").string();
  io::write_file(fc, archive_csv(3, 60, 0.8, 0.6, 1));
  io::write_file(ref, archive_csv(3, 60, 1.5, 0.4, 1));
  io::write_file(st, "station_id,tpi,mhd,altitude,latitude\nST0,10,-120,450,46.5\nST1,-25,80,1200,46.9\n"
                     "ST2,3,15,300,47.4\n");

  struct Run {
    std::string name, task, args;
  };
  const std::vector<Run> runs = {
      {"score", "score", "-i " + fc + " --score crps --score twcrps --score vrcrps --score brier --score es --score vs "
                                      "--score tw_es --score vr_es --threshold 25 --threshold 27"},
      {"score_smooth", "score", "-i " + fc + " --smooth --score owcrps --score owcrps_bs --score crps --format jsonl"},
      {"diagnose", "diagnose", "-i " + fc + " --threshold 25 --seed 11"},
      {"diagnose_smooth", "diagnose", "-i " + fc + " --threshold 25 --smooth"},
      {"postprocess", "postprocess", "-i " + fc + " --stations " + st},
      {"report", "report", "-i " + fc + " --reference " + ref},
      {"fig1", "synth", "fig1 -n 41"},
      {"fig2", "synth", "fig2 -n 20000 --seed 5"},
      {"fig3", "synth", "fig3 -n 20000 --seed 5"},
      {"propriety", "synth", "propriety -n 1000 --seed 5"},
      {"impropriety", "synth", "impropriety -n 20000 --seed 5"},
  };
  std::size_t files = 0;
  for (const auto& r : runs) {
    const auto first = work / (r.name + "_a");
    const auto second = work / (r.name + "_b");
    const std::string log = " >" + (work / (r.name + ".log")).string() + " 2>&1";
    const int rc1 = shell(cli + " " + r.task + " " + r.args + " --out " + first.string() + log);
    c.require(rc1 == 0, r.name + " exited " + std::to_string(rc1));
    if (rc1 != 0) continue;
    const int rc2 = shell(cli + " " + r.task + " --config " + (first / "manifest.json").string() + " --out " +
                          second.string() + log);
    c.require(rc2 == 0, r.name + " rerun exited " + std::to_string(rc2));
    const auto a = listing(first), b = listing(second);
    c.require(a == b, r.name + ": different file sets");
    for (const auto& f : a) {
      if (f == "manifest.json") continue;
      ++files;
      c.require(io::read_file((first / f).string()) == io::read_file((second / f).string()),
                r.name + "/" + f + " differs");
    }
    // The manifests agree on everything except timing.
    auto ma = io::json::parse(io::read_file((first / "manifest.json").string()));
    auto mb = io::json::parse(io::read_file((second / "manifest.json").string()));
    for (auto* m : {&ma, &mb}) {
      m->erase("wall_time_seconds");
      (*m)["config"].erase("output");
    }
    c.require(ma == mb, r.name + ": manifests differ beyond timing");
  }
  c.note(std::to_string(runs.size()) + " runs, " + std::to_string(files) + " output files compared");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <wxverif_cli> <scratch directory>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"score curves around the threshold", fig1_shape},
      {"ideal forecaster histograms", fig2_ideal},
      {"tail forecasters of a logistic truth", fig3_tails},
      {"propriety Monte Carlo", propriety},
      {"naive weighting is improper", impropriety},
      {"analytic identities", identities},
      {"heat levels", heat_levels},
      {"EMOS and ECC", emos_pipeline},
      {"skill spot check", skill_spot},
      {"CLI reproducibility", [&](Check& c) { reproducibility(c, cli, work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok();
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << c.summary() << ") [" << num(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
