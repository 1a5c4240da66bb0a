#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/heat_level.hpp"
#include "wxverif/core/weight.hpp"
#include "wxverif/io/archive.hpp"
#include "wxverif/io/format.hpp"
#include "wxverif/synthlab.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wxverif::io {

using nlohmann::json;

enum class Task { kScore, kDiagnose, kPostprocess, kSynth, kReport };

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "score") return Task::kScore;
  if (s == "diagnose") return Task::kDiagnose;
  if (s == "postprocess") return Task::kPostprocess;
  if (s == "synth") return Task::kSynth;
  if (s == "report") return Task::kReport;
  return std::nullopt;
}

inline const char* to_string(Task t) {
  switch (t) {
    case Task::kScore: return "score";
    case Task::kDiagnose: return "diagnose";
    case Task::kPostprocess: return "postprocess";
    case Task::kSynth: return "synth";
    case Task::kReport: return "report";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Weight and chaining functions as JSON objects: {"type": ..., params}
// ---------------------------------------------------------------------------

namespace detail {

inline double num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw DataError("config: '" + j.value("type", std::string("?")) + "' needs numeric field '" + key + "'");
  }
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw DataError(std::string("config: field '") + key + "' must be finite");
  return v;
}

inline std::vector<double> vec(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw DataError("config: '" + j.value("type", std::string("?")) + "' needs array field '" + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_string() && (v == "inf" || v == "-inf")) {
      out.push_back(v == "inf" ? INFINITY : -INFINITY);
    } else {
      throw DataError(std::string("config: field '") + key + "' must hold numbers (or \"inf\"/\"-inf\")");
    }
  }
  return out;
}

inline std::string type_of(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw DataError(std::string("config: ") + what + " must be an object with a string 'type'");
  }
  return j["type"].get<std::string>();
}

}  // namespace detail

inline WeightFunction parse_weight(const json& j, HeatThresholds heat = {}) {
  using namespace detail;
  const std::string t = type_of(j, "weight");
  if (t == "constant") return weights::Constant{};
  if (t == "indicator_above") return weights::IndicatorAbove{num(j, "threshold")};
  if (t == "indicator_below") return weights::IndicatorBelow{num(j, "threshold")};
  if (t == "gauss_pdf") return weights::GaussPdf{num(j, "mu"), num(j, "sigma")};
  if (t == "one_minus_gauss_pdf_ratio") return weights::OneMinusGaussPdfRatio{num(j, "mu"), num(j, "sigma")};
  if (t == "gauss_cdf") return weights::GaussCdf{num(j, "mu"), num(j, "sigma")};
  if (t == "one_minus_gauss_cdf") return weights::OneMinusGaussCdf{num(j, "mu"), num(j, "sigma")};
  if (t == "mv_gauss_pdf") return weights::MvGaussPdf{vec(j, "mu"), vec(j, "var")};
  if (t == "one_minus_mv_gauss_pdf_ratio") return weights::OneMinusMvGaussPdfRatio{vec(j, "mu"), vec(j, "var")};
  if (t == "mv_gauss_cdf") return weights::MvGaussCdf{vec(j, "mu"), vec(j, "var")};
  if (t == "one_minus_mv_gauss_cdf") return weights::OneMinusMvGaussCdf{vec(j, "mu"), vec(j, "var")};
  if (t == "box") return weights::BoxIndicator{vec(j, "lower"), vec(j, "upper")};
  if (t == "heat_level") {
    if (j.contains("warm")) heat.warm = num(j, "warm");
    if (j.contains("hot")) heat.hot = num(j, "hot");
    return weights::HeatLevelIndicator{heat_level_from_int(static_cast<int>(num(j, "level"))), heat};
  }
  throw DataError("config: unknown weight type '" + t + "'");
}

inline ChainingFunction parse_chaining(const json& j, HeatThresholds heat = {}) {
  using namespace detail;
  const std::string t = type_of(j, "chaining");
  if (t == "identity") return chainings::Identity{};
  if (t == "censor_above") return chainings::CensorAbove{num(j, "threshold")};
  if (t == "censor_below") return chainings::CensorBelow{num(j, "threshold")};
  if (t == "gauss_pdf_chain") return chainings::GaussPdfChain{num(j, "mu"), num(j, "sigma")};
  if (t == "tail_chain") return chainings::TailChain{num(j, "mu"), num(j, "sigma")};
  if (t == "gauss_cdf_chain") return chainings::GaussCdfChain{num(j, "mu"), num(j, "sigma")};
  if (t == "one_minus_gauss_cdf_chain") return chainings::OneMinusGaussCdfChain{num(j, "mu"), num(j, "sigma")};
  if (t == "collapse_outside") {
    if (!j.contains("weight")) throw DataError("config: collapse_outside needs 'weight'");
    return chainings::CollapseOutside{parse_weight(j["weight"], heat), vec(j, "z0")};
  }
  throw DataError("config: unknown chaining type '" + t + "'");
}

// ---------------------------------------------------------------------------
// Score requests
// ---------------------------------------------------------------------------

enum class ScoreKind {
  kCrps, kBrier, kTwCrps, kOwCrps, kOwCrpsBs, kVrCrps, kPit,
  kEs, kVs, kTwEs, kTwVs, kOwEs, kOwVs, kVrEs, kVrVs,
};

inline std::optional<ScoreKind> parse_score_kind(std::string_view s) {
  static constexpr std::pair<std::string_view, ScoreKind> kNames[] = {
      {"crps", ScoreKind::kCrps},        {"brier", ScoreKind::kBrier},       {"twcrps", ScoreKind::kTwCrps},
      {"owcrps", ScoreKind::kOwCrps},    {"owcrps_bs", ScoreKind::kOwCrpsBs}, {"vrcrps", ScoreKind::kVrCrps},
      {"pit", ScoreKind::kPit},          {"es", ScoreKind::kEs},             {"vs", ScoreKind::kVs},
      {"tw_es", ScoreKind::kTwEs},       {"tw_vs", ScoreKind::kTwVs},        {"ow_es", ScoreKind::kOwEs},
      {"ow_vs", ScoreKind::kOwVs},       {"vr_es", ScoreKind::kVrEs},        {"vr_vs", ScoreKind::kVrVs},
  };
  for (const auto& [name, k] : kNames) {
    if (s == name) return k;
  }
  return std::nullopt;
}

inline bool is_multivariate(ScoreKind k) { return k >= ScoreKind::kEs; }

/// One requested score. `label` names it in output tables.
struct ScoreSpec {
  ScoreKind kind = ScoreKind::kCrps;
  std::string label;
  std::optional<WeightFunction> weight;
  std::optional<ChainingFunction> chaining;
  std::optional<double> threshold;
  double x0 = 0.0;
  /// Lead times forming the dimensions of a multivariate score.
  std::vector<int> leads;
  VariogramSpec variogram;
  bool fair = false;
};

namespace detail {

inline bool needs_threshold(ScoreKind k) { return k == ScoreKind::kBrier || k == ScoreKind::kOwCrpsBs; }
inline bool needs_weight(ScoreKind k) {
  return k == ScoreKind::kTwCrps || k == ScoreKind::kOwCrps || k == ScoreKind::kVrCrps || k == ScoreKind::kTwEs ||
         k == ScoreKind::kTwVs || k == ScoreKind::kOwEs || k == ScoreKind::kOwVs || k == ScoreKind::kVrEs ||
         k == ScoreKind::kVrVs;
}

inline std::string fmt_short(double x) { return format_double(x); }

}  // namespace detail

/// Expands one score object. Weighted and thresholded scores without their
/// own weight or threshold get one instance per heat threshold
/// (indicator above t, censoring at t for chainings).
inline std::vector<ScoreSpec> parse_score(const json& j, const std::vector<double>& thresholds, HeatThresholds heat) {
  const std::string name = j.is_string() ? j.get<std::string>() : j.value("name", std::string());
  const auto kind = parse_score_kind(name);
  if (!kind) throw DataError("config: unknown score '" + name + "'");
  const json obj = j.is_object() ? j : json::object();

  ScoreSpec base;
  base.kind = *kind;
  base.x0 = obj.contains("x0") ? detail::num(obj, "x0") : 0.0;
  base.fair = obj.value("fair", false);
  if (obj.contains("order")) base.variogram.order = detail::num(obj, "order");
  if (obj.contains("leads")) {
    for (const auto& l : obj["leads"]) base.leads.push_back(l.get<int>());
  }
  if (is_multivariate(*kind) && base.leads.empty()) base.leads = {1, 2, 3};
  if (obj.contains("weight")) base.weight = parse_weight(obj["weight"], heat);
  if (obj.contains("chaining")) base.chaining = parse_chaining(obj["chaining"], heat);
  if (obj.contains("threshold")) base.threshold = detail::num(obj, "threshold");

  std::string suffix;
  if (base.weight) suffix = describe(*base.weight);
  if (base.chaining) suffix = describe(*base.chaining);
  if (base.threshold && !base.weight && !base.chaining) suffix = "t=" + detail::fmt_short(*base.threshold);
  if (!is_multivariate(*kind) && base.x0 != 0.0) suffix += ",x0=" + detail::fmt_short(base.x0);

  const bool weighted = detail::needs_weight(*kind);
  const bool thresholded = detail::needs_threshold(*kind);
  const bool complete = (!weighted || base.weight || base.chaining) && (!thresholded || base.threshold);
  std::vector<ScoreSpec> out;
  if (complete) {
    base.label = name + (suffix.empty() ? "" : "[" + suffix + "]");
    out.push_back(std::move(base));
    return out;
  }
  if (thresholds.empty()) throw DataError("config: score '" + name + "' needs a weight or threshold");
  for (double t : thresholds) {
    ScoreSpec s = base;
    if (thresholded) s.threshold = t;
    if (weighted) {
      const std::size_t d = is_multivariate(*kind) ? s.leads.size() : 1;
      if (*kind == ScoreKind::kTwEs || *kind == ScoreKind::kTwVs) {
        s.chaining = chainings::CensorAbove{t};
      } else if (d == 1) {
        s.weight = weights::IndicatorAbove{t};
      } else {
        s.weight = weights::BoxIndicator{std::vector<double>(d, t), std::vector<double>(d, INFINITY)};
      }
    }
    s.label = name + "[t=" + detail::fmt_short(t) + "]";
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct DiagnoseOptions {
  std::optional<double> threshold;  // default: first heat threshold
  std::size_t bins = kDefaultPitBins;
  std::size_t resamples = 200;
  double band_level = 0.99;
};

struct PostprocessOptions {
  std::size_t window_days = 45;
  bool lapse_rate = true;
  std::size_t min_training_cases = 10;
};

struct RunConfig {
  Task task = Task::kScore;
  std::string input;
  std::string reference;
  std::string stations;
  std::string output = "out";
  Format format = Format::kCsv;
  std::uint64_t seed = 0;
  bool smooth = false;
  double reject_threshold = 0.01;
  std::vector<double> thresholds = {25.0, 27.0};
  std::vector<std::string> aggregate_by = {"lead_time"};
  std::vector<ScoreSpec> scores;
  DiagnoseOptions diagnose;
  PostprocessOptions postprocess;
  ExperimentSpec experiment;
  /// The configuration as a JSON document, with command-line overrides
  /// applied; written into every manifest.
  json source = json::object();

  HeatThresholds heat() const {
    HeatThresholds h;
    if (thresholds.size() >= 1) h.warm = thresholds[0];
    if (thresholds.size() >= 2) h.hot = thresholds[1];
    return h;
  }
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw DataError(std::string("config: unknown key '") + k + "' in " + where);
    }
  }
}

}  // namespace detail

/// Builds a RunConfig from a configuration document. A manifest is accepted
/// too: its "config" member is used.
inline RunConfig parse_config(json doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("manifest_version")) doc = doc["config"];
  if (!doc.is_object()) throw DataError("config: top level must be a JSON object");
  detail::check_keys(doc,
                     {"task", "input", "reference", "stations", "output", "format", "seed", "smooth",
                      "reject_threshold", "thresholds", "aggregate_by", "scores", "diagnose", "postprocess",
                      "experiment"},
                     "the top level");
  RunConfig c;
  try {
    if (doc.contains("task")) {
      const auto t = parse_task(doc["task"].get<std::string>());
      if (!t) throw DataError("config: unknown task '" + doc["task"].get<std::string>() + "'");
      c.task = *t;
    }
    c.input = doc.value("input", c.input);
    c.reference = doc.value("reference", c.reference);
    c.stations = doc.value("stations", c.stations);
    c.output = doc.value("output", c.output);
    if (doc.contains("format")) {
      const auto f = parse_format(doc["format"].get<std::string>());
      if (!f) throw DataError("config: format must be csv or jsonl");
      c.format = *f;
    }
    c.seed = doc.value("seed", c.seed);
    c.smooth = doc.value("smooth", c.smooth);
    c.reject_threshold = doc.value("reject_threshold", c.reject_threshold);
    if (!(c.reject_threshold >= 0.0 && c.reject_threshold <= 1.0)) {
      throw DataError("config: reject_threshold must lie in [0, 1]");
    }
    if (doc.contains("thresholds")) c.thresholds = doc["thresholds"].get<std::vector<double>>();
    for (double t : c.thresholds) {
      if (!std::isfinite(t)) throw DataError("config: thresholds must be finite");
    }
    if (doc.contains("aggregate_by")) c.aggregate_by = doc["aggregate_by"].get<std::vector<std::string>>();
    for (const auto& k : c.aggregate_by) {
      if (k != "lead_time" && k != "station_id" && k != "init_date") {
        throw DataError("config: aggregate_by entries must be lead_time, station_id or init_date");
      }
    }
    if (doc.contains("scores")) {
      for (const auto& s : doc["scores"]) {
        auto specs = parse_score(s, c.thresholds, c.heat());
        c.scores.insert(c.scores.end(), specs.begin(), specs.end());
      }
    }
    if (doc.contains("diagnose")) {
      const auto& d = doc["diagnose"];
      detail::check_keys(d, {"threshold", "bins", "resamples", "band_level"}, "diagnose");
      if (d.contains("threshold")) c.diagnose.threshold = detail::num(d, "threshold");
      c.diagnose.bins = d.value("bins", c.diagnose.bins);
      c.diagnose.resamples = d.value("resamples", c.diagnose.resamples);
      c.diagnose.band_level = d.value("band_level", c.diagnose.band_level);
    }
    if (doc.contains("postprocess")) {
      const auto& p = doc["postprocess"];
      detail::check_keys(p, {"window_days", "lapse_rate", "min_training_cases"}, "postprocess");
      c.postprocess.window_days = p.value("window_days", c.postprocess.window_days);
      c.postprocess.lapse_rate = p.value("lapse_rate", c.postprocess.lapse_rate);
      c.postprocess.min_training_cases = p.value("min_training_cases", c.postprocess.min_training_cases);
    }
    if (doc.contains("experiment")) {
      const auto& e = doc["experiment"];
      detail::check_keys(e, {"name", "n", "thresholds"}, "experiment");
      if (e.contains("name")) {
        const auto k = parse_experiment(e["name"].get<std::string>());
        if (!k) throw DataError("config: unknown experiment '" + e["name"].get<std::string>() + "'");
        c.experiment.kind = *k;
      }
      c.experiment.n = e.value("n", std::size_t{0});
      if (e.contains("thresholds")) c.experiment.thresholds = e["thresholds"].get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  c.experiment.seed = c.seed;
  c.experiment.output = c.output;
  c.source = std::move(doc);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  const auto doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw DataError("config: '" + path + "' is not valid JSON");
  return parse_config(doc);
}

/// Re-parses after patching the source document, so struct and echo agree.
inline RunConfig with_override(const RunConfig& c, const std::string& key, json value) {
  json doc = c.source;
  doc[key] = std::move(value);
  return parse_config(std::move(doc));
}

}  // namespace wxverif::io
