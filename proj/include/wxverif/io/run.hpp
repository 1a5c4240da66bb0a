#pragma once

#include "wxverif/calibration.hpp"
#include "wxverif/core/errors.hpp"
#include "wxverif/core/rng.hpp"
#include "wxverif/io/archive.hpp"
#include "wxverif/io/config.hpp"
#include "wxverif/io/format.hpp"
#include "wxverif/io/scoring.hpp"
#include "wxverif/postprocess.hpp"
#include "wxverif/synthlab.hpp"

#include <boost/version.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace wxverif::io {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kManifestVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Usage: bad arguments or configuration that the caller must change.
/// Data: inputs that cannot support the request. Numerical: accuracy targets missed.
inline int exit_code_for(const Error& e) {
  const std::string_view c = e.category();
  if (c == "numerical") return kExitNumerical;
  if (c == "contract_violation" || c == "unsupported") return kExitUsage;
  return kExitData;
}

/// Files written by a run, in write order, with their fingerprints.
class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_ + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    write_file(path(name), content);
    files_.push_back({name, hex64(fnv1a(content)), content.size()});
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }
  const std::string& dir() const { return dir_; }

  json listing() const {
    json a = json::array();
    for (const auto& f : files_) a.push_back({{"file", f.name}, {"fnv1a", f.hash}, {"bytes", f.bytes}});
    return a;
  }

 private:
  struct Entry {
    std::string name;
    std::string hash;
    std::size_t bytes;
  };
  std::string dir_;
  std::vector<Entry> files_;
};

struct RunReport {
  json inputs = json::array();
  /// Small results echoed into the manifest (reliability indices, counts).
  json results = json::object();
};

namespace detail {

inline IngestResult load_archive(const std::string& path, const RunConfig& c, RunReport& rep) {
  if (path.empty()) throw DataError(std::string(to_string(c.task)) + ": no input archive given (--input or 'input')");
  const std::string text = read_file(path);
  const Format fmt = format_of(path);
  IngestOptions opt;
  opt.reject_threshold = c.reject_threshold;
  auto res = fmt == Format::kCsv ? ingest_csv(text, opt, path) : ingest_jsonl(text, opt, path);
  rep.inputs.push_back({{"path", path},
                        {"fnv1a", hex64(fnv1a(text))},
                        {"rows", res.rows_read},
                        {"rejects", res.rejects.size()},
                        {"records", res.archive.records.size()}});
  return res;
}

inline std::string ext(Format f) { return f == Format::kCsv ? ".csv" : ".jsonl"; }

inline std::string histogram_csv(const HistogramSummary& h) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"bin", "lower", "upper", "count", "frequency"});
  const double k = static_cast<double>(h.bins());
  for (std::size_t b = 0; b < h.bins(); ++b) {
    w.row({std::to_string(b + 1), format_double(static_cast<double>(b) / k),
           format_double(static_cast<double>(b + 1) / k), std::to_string(h.counts[b]),
           format_double(h.frequencies[b])});
  }
  return os.str();
}

inline std::string ecdf_csv(const std::vector<EcdfPoint>& pts) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"value", "cumulative"});
  for (const auto& p : pts) w.row({format_double(p.value), format_double(p.cumulative)});
  return os.str();
}

inline std::string reliability_csv(const ReliabilityFit& f) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"forecast_probability", "conditional_event_probability"});
  for (std::size_t i = 0; i < f.probs.size(); ++i) w.row({format_double(f.probs[i]), format_double(f.cep[i])});
  return os.str();
}

inline std::string band_csv(const ReliabilityFit& f) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"forecast_probability", "lower", "upper"});
  for (std::size_t i = 0; i < f.band_probs.size(); ++i) {
    w.row({format_double(f.band_probs[i]), format_double(f.band_lower[i]), format_double(f.band_upper[i])});
  }
  return os.str();
}

// ECDF files of a million points are thinned to every k-th point plus the last.
inline std::vector<EcdfPoint> thin(const std::vector<EcdfPoint>& pts, std::size_t max_points) {
  if (pts.size() <= max_points) return pts;
  std::vector<EcdfPoint> out;
  const std::size_t step = (pts.size() + max_points - 1) / max_points;
  for (std::size_t i = 0; i < pts.size(); i += step) out.push_back(pts[i]);
  if (out.back().value != pts.back().value || out.back().cumulative != pts.back().cumulative) out.push_back(pts.back());
  return out;
}

inline json histogram_json(const HistogramSummary& h) {
  return {{"n", h.n}, {"reliability_index", h.reliability_index}};
}

inline std::string propriety_csv(const std::vector<ProprietyRow>& rows) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"score", "pair", "n", "mean_truth", "mean_alternative", "se_difference", "pass"});
  for (const auto& r : rows) {
    w.row({r.score, r.pair, std::to_string(r.n), format_double(r.mean_truth), format_double(r.mean_alt),
           format_double(r.se), r.pass ? "1" : "0"});
  }
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

inline void run_score(const RunConfig& c, OutputSet& out, RunReport& rep) {
  if (c.scores.empty()) throw DataError("score: no scores requested ('scores' in the config)");
  auto in = detail::load_archive(c.input, c, rep);
  out.write("rejects.csv", rejects_csv(in.rejects));
  const auto table = score_archive(in.archive, c.scores, {c.smooth, c.aggregate_by});
  out.write("scores" + detail::ext(c.format),
            c.format == Format::kCsv ? records_csv(table.records) : records_jsonl(table.records));
  out.write("score_means.csv", groups_csv(table.groups));
  rep.results["cases"] = in.archive.records.size();
  rep.results["score_records"] = table.records.size();
}

inline void run_report(const RunConfig& c, OutputSet& out, RunReport& rep) {
  if (c.reference.empty()) throw DataError("report: no reference archive given (--reference or 'reference')");
  std::vector<ScoreSpec> specs = c.scores;
  if (specs.empty()) {
    for (const char* s : {"crps", "es", "vs"}) {
      auto e = parse_score(json(s), c.thresholds, c.heat());
      specs.insert(specs.end(), e.begin(), e.end());
    }
  }
  auto fc = detail::load_archive(c.input, c, rep);
  auto ref = detail::load_archive(c.reference, c, rep);
  const ScoreOptions opt{c.smooth, c.aggregate_by};
  const auto s = score_archive(fc.archive, specs, opt);
  const auto r = score_archive(ref.archive, specs, opt);
  const auto rows = skill_table(s, r);
  out.write("report.csv", skill_csv(rows));
  out.write("report_grid.csv", skill_grid_csv(rows));
  std::size_t undefined = 0;
  for (const auto& row : rows) undefined += row.undefined;
  rep.results["groups"] = rows.size();
  rep.results["undefined_skill_groups"] = undefined;
}

inline void run_diagnose(const RunConfig& c, OutputSet& out, RunReport& rep) {
  auto in = detail::load_archive(c.input, c, rep);
  out.write("rejects.csv", rejects_csv(in.rejects));
  const auto& recs = in.archive.records;
  const double t = c.diagnose.threshold ? *c.diagnose.threshold
                                        : (c.thresholds.empty() ? throw DataError("diagnose: no threshold")
                                                                : c.thresholds.front());
  const std::size_t bins = c.diagnose.bins;
  const bool parametric = c.smooth;
  if (!parametric && in.archive.member_count < 2 && !recs.empty()) {
    throw Unsupported("diagnose: single-member forecasts have no ranks; smooth them (--smooth)");
  }

  std::vector<double> pits, cpits, probs;
  std::vector<int> ranks, events;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    events.push_back(r.obs > t ? 1 : 0);
    if (parametric) {
      const Parametric f = smooth_ensemble(r.members);
      pits.push_back(pit(f, r.obs));
      probs.push_back(sf(f, t));
      try {
        if (const auto u = cpit(f, r.obs, t)) cpits.push_back(*u);
      } catch (const DegenerateConditional&) {
        ++skipped;
      }
    } else {
      ranks.push_back(rank(r.members, r.obs, stream_seed(c.seed, i)));
      std::size_t above = 0;
      for (double x : r.members) above += x > t;
      probs.push_back(static_cast<double>(above) / static_cast<double>(r.members.size()));
      try {
        if (const auto u = cpit_ensemble(r.members, r.obs, t)) cpits.push_back(*u);
      } catch (const Unsupported&) {
        if (r.obs > t) ++skipped;
      } catch (const DegenerateConditional&) {
        if (r.obs > t) ++skipped;
      }
    }
  }
  if (parametric) {
    const auto h = pit_histogram(pits, bins);
    out.write("pit_histogram.csv", detail::histogram_csv(h));
    out.write("pit_ecdf.csv", detail::ecdf_csv(detail::thin(pit_ecdf(pits), 2000)));
    rep.results["pit"] = detail::histogram_json(h);
  } else if (!recs.empty()) {
    const auto h = rank_histogram(ranks, in.archive.member_count);
    out.write("rank_histogram.csv", detail::histogram_csv(h));
    rep.results["rank"] = detail::histogram_json(h);
  }
  const auto ch = pit_histogram(cpits, bins);
  out.write("cpit_histogram.csv", detail::histogram_csv(ch));
  out.write("cpit_ecdf.csv", detail::ecdf_csv(detail::thin(pit_ecdf(cpits), 2000)));
  rep.results["cpit"] = detail::histogram_json(ch);
  rep.results["cpit_threshold"] = t;
  rep.results["cpit_skipped_exceedances"] = skipped;
  if (!probs.empty()) {
    CorpOptions co;
    co.band_level = c.diagnose.band_level;
    co.resamples = c.diagnose.resamples;
    co.seed = stream_seed(c.seed, 0xc0);
    const auto fit = corp_reliability(probs, events, co);
    out.write("reliability.csv", detail::reliability_csv(fit));
    out.write("reliability_band.csv", detail::band_csv(fit));
  }
}

inline void run_postprocess(const RunConfig& c, OutputSet& out, RunReport& rep) {
  auto in = detail::load_archive(c.input, c, rep);
  out.write("rejects.csv", rejects_csv(in.rejects));
  std::map<std::string, StationMeta> stations;
  if (!c.stations.empty()) {
    const std::string text = read_file(c.stations);
    stations = ingest_stations(text, c.stations);
    rep.inputs.push_back({{"path", c.stations}, {"fnv1a", hex64(fnv1a(text))}, {"stations", stations.size()}});
  }
  const auto meta_of = [&](const std::string& id) {
    if (stations.empty()) return StationMeta{id};
    const auto it = stations.find(id);
    if (it == stations.end()) throw DataError("postprocess: station '" + id + "' missing from the station file");
    return it->second;
  };
  const auto& pp = c.postprocess;

  // Records by lead time, then by initialisation day.
  std::map<int, std::map<std::int64_t, std::vector<const ArchiveRecord*>>> by_lead;
  for (const auto& r : in.archive.records) by_lead[r.lead_time][day_number(r.init_date)].push_back(&r);

  Archive result;
  result.member_count = in.archive.member_count;
  std::ostringstream params;
  CsvWriter pw(params);
  pw.row({"lead_time", "init_date", "training_cases", "converged", "iterations", "intercept", "mean_slope",
          "mhd_slope", "tpi_slope", "var_intercept", "var_slope"});
  std::size_t skipped = 0;
  std::size_t fits = 0;

  const auto training_case = [&](const ArchiveRecord& r) {
    const StationMeta m = meta_of(r.station_id);
    RunningMoments mom;
    for (double x : r.members) mom.push(pp.lapse_rate ? lapse_rate_correct(x, m.mhd, 0.0) : x);
    return TrainingCase{mom.mean(), mom.sample_variance(), m.mhd, m.tpi, r.obs};
  };

  for (const auto& [lead, days] : by_lead) {
    TrainingWindow window(pp.window_days);
    auto next_train = days.begin();
    std::optional<EmosParams> warm;
    for (const auto& [day, cases] : days) {
      // Only forecasts verified before this initialisation may train.
      while (next_train != days.end() && next_train->first + lead < day) {
        std::vector<TrainingCase> tc;
        for (const auto* r : next_train->second) tc.push_back(training_case(*r));
        window.push_day(next_train->first, std::move(tc));
        ++next_train;
      }
      const auto train = window.cases();
      if (train.size() < pp.min_training_cases) {
        skipped += cases.size();
        continue;
      }
      const auto fit = fit_emos(train, warm);
      ++fits;
      warm = fit.params;
      EmosParams p = fit.params;
      p.lead_time = lead;
      const auto& first = *cases.front();
      pw.row({std::to_string(lead), first.init_date, std::to_string(train.size()), fit.converged ? "1" : "0",
              std::to_string(fit.iterations), format_double(p.intercept), format_double(p.mean_slope),
              format_double(p.mhd_slope), format_double(p.tpi_slope), format_double(p.var_intercept),
              format_double(p.var_slope)});
      for (const auto* r : cases) {
        const StationMeta m = meta_of(r->station_id);
        const TrainingCase tc = training_case(*r);
        const Parametric marginal = predict_emos(p, tc.ens_mean, tc.ens_var, m);
        const MvEnsemble raw(1, r->members.size(), r->members);
        const auto reordered = ecc_reorder(std::span<const Parametric>(&marginal, 1), raw);
        ArchiveRecord o = *r;
        for (std::size_t k = 0; k < o.members.size(); ++k) o.members[k] = reordered(0, k);
        result.records.push_back(std::move(o));
      }
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const ArchiveRecord& a, const ArchiveRecord& b) { return a.key() < b.key(); });
  out.write("postprocessed" + detail::ext(c.format), emit(result, c.format));
  out.write("emos_params.csv", params.str());
  rep.results["fits"] = fits;
  rep.results["postprocessed_cases"] = result.records.size();
  rep.results["skipped_cases_insufficient_training"] = skipped;
}

inline void run_synth(const RunConfig& c, OutputSet& out, RunReport& rep) {
  const ExperimentSpec& e = c.experiment;
  e.validate();
  const std::size_t n = e.samples();
  const double t = e.threshold();
  rep.results["experiment"] = std::string(to_string(e.kind));
  rep.results["n"] = n;
  rep.results["threshold"] = t;
  rep.results["seed"] = c.seed;
  switch (e.kind) {
    case ExperimentKind::kFig1Curves: {
      const auto grid = linear_grid(-3.0, 3.0, std::max<std::size_t>(n, 2));
      std::ostringstream os;
      CsvWriter w(os);
      w.row({"y", "crps", "twcrps", "owcrps", "vrcrps"});
      for (const auto& r : run_fig1_curves(grid, t)) {
        w.row({format_double(r.y), format_double(r.crps), format_double(r.twcrps), format_double(r.owcrps),
               format_double(r.vrcrps)});
      }
      out.write("fig1_curves.csv", os.str());
      break;
    }
    case ExperimentKind::kFig2Ideal: {
      const auto r = run_fig2_ideal(n, 1.0 / 3.0, t, c.seed);
      out.write("fig2_pit.csv", detail::histogram_csv(r.pit));
      out.write("fig2_restricted_pit.csv", detail::histogram_csv(r.restricted_pit));
      out.write("fig2_cpit.csv", detail::histogram_csv(r.cpit));
      rep.results["pit"] = detail::histogram_json(r.pit);
      rep.results["restricted_pit"] = detail::histogram_json(r.restricted_pit);
      rep.results["cpit"] = detail::histogram_json(r.cpit);
      break;
    }
    case ExperimentKind::kFig3Tails: {
      const auto r = run_fig3_tails(n, t, c.seed);
      rep.results["exceedances"] = r.exceedances;
      std::ostringstream os;
      CsvWriter w(os);
      w.row({"forecaster", "exceedances", "cpit_reliability_index", "cpit_first_bin", "cpit_last_bin",
             "cpit_ecdf_max_deviation"});
      for (const auto& f : r.forecasters) {
        out.write("fig3_cpit_" + f.name + ".csv", detail::histogram_csv(f.cpit));
        out.write("fig3_cpit_ecdf_" + f.name + ".csv", detail::ecdf_csv(detail::thin(f.cpit_ecdf, 2000)));
        out.write("fig3_reliability_" + f.name + ".csv", detail::reliability_csv(f.exceedance_reliability));
        out.write("fig3_reliability_band_" + f.name + ".csv", detail::band_csv(f.exceedance_reliability));
        w.row({f.name, std::to_string(f.cpit.n), format_double(f.cpit.reliability_index),
               format_double(f.cpit.frequencies.front()), format_double(f.cpit.frequencies.back()),
               format_double(f.ecdf_max_deviation)});
        rep.results["cpit_" + f.name] = detail::histogram_json(f.cpit);
      }
      out.write("fig3_summary.csv", os.str());
      break;
    }
    case ExperimentKind::kProprietyMc: {
      ProprietyOptions o;
      o.univariate_draws = n;
      o.multivariate_draws = std::max<std::size_t>(n / 5, 1);
      o.threshold = t;
      o.seed = c.seed;
      const auto rows = run_propriety_mc(o);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += !r.pass;
      out.write("propriety.csv", detail::propriety_csv(rows));
      rep.results["comparisons"] = rows.size();
      rep.results["failed"] = failed;
      break;
    }
    case ExperimentKind::kImproprietyDemo: {
      const auto r = run_impropriety_demo(t, n, c.seed);
      out.write("impropriety.csv", detail::propriety_csv({r.naive, r.threshold_weighted}));
      break;
    }
  }
}

/// Runs the configured task into c.output and writes manifest.json there.
inline RunReport run(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  OutputSet out(c.output);
  RunReport rep;
  switch (c.task) {
    case Task::kScore: run_score(c, out, rep); break;
    case Task::kDiagnose: run_diagnose(c, out, rep); break;
    case Task::kPostprocess: run_postprocess(c, out, rep); break;
    case Task::kSynth: run_synth(c, out, rep); break;
    case Task::kReport: run_report(c, out, rep); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {
      {"manifest_version", kManifestVersion},
      {"tool", "wxverif"},
      {"version", kToolVersion},
      {"task", to_string(c.task)},
      {"seed", c.seed},
      {"config", c.source},
      {"inputs", rep.inputs},
      {"outputs", out.listing()},
      {"results", rep.results},
      {"build", {{"compiler", __VERSION__}, {"boost", BOOST_LIB_VERSION}, {"cplusplus", __cplusplus}}},
      {"wall_time_seconds", wall},
  };
  write_file(out.path("manifest.json"), manifest.dump(2) + "\n");
  return rep;
}

}  // namespace wxverif::io
