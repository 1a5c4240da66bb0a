#pragma once

#include "wxverif/calibration.hpp"
#include "wxverif/core/errors.hpp"
#include "wxverif/io/archive.hpp"
#include "wxverif/io/config.hpp"
#include "wxverif/io/format.hpp"
#include "wxverif/mvscores.hpp"
#include "wxverif/postprocess.hpp"
#include "wxverif/uniscores.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace wxverif::io {

/// Score of one case. `lead` is the lead time, or the lead times joined by
/// '+' for a multivariate score.
struct ScoreRecord {
  std::string score;
  std::string station_id;
  std::string init_date;
  std::string lead;
  double value = 0.0;

  auto key() const { return std::tie(score, station_id, init_date, lead); }
};

struct GroupMean {
  std::string score;
  /// "all", or "key=value" pairs joined by ';'.
  std::string group;
  std::size_t n = 0;
  double mean = 0.0;
};

struct ScoreTable {
  std::vector<ScoreRecord> records;
  std::vector<GroupMean> groups;
};

struct ScoreOptions {
  bool smooth = false;
  std::vector<std::string> aggregate_by = {"lead_time"};
};

namespace detail {

// Compensated sum over values already in canonical order.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Numeric-aware ordering so lead "10" sorts after "2".
inline bool natural_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  const auto px = std::from_chars(a.data(), a.data() + a.size(), x);
  const auto py = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool nx = px.ec == std::errc(), ny = py.ec == std::errc();
  if (nx && ny && x != y) return x < y;
  if (nx != ny) return nx;
  return a < b;
}

inline std::string group_of(const ScoreRecord& r, const std::vector<std::string>& keys) {
  std::string g;
  for (const auto& k : keys) {
    if (!g.empty()) g += ';';
    if (k == "lead_time") g += "lead_time=" + r.lead;
    if (k == "station_id") g += "station_id=" + r.station_id;
    if (k == "init_date") g += "init_date=" + r.init_date;
  }
  return g;
}

inline Forecast univariate_forecast(const ArchiveRecord& r, bool smooth) {
  if (smooth) return smooth_ensemble(r.members);
  return Ensemble(r.members);
}

inline double score_univariate(const ScoreSpec& s, const ArchiveRecord& r, bool smooth) {
  const Forecast f = univariate_forecast(r, smooth);
  switch (s.kind) {
    case ScoreKind::kCrps: return crps(f, r.obs);
    case ScoreKind::kBrier: return brier(f, r.obs, *s.threshold);
    case ScoreKind::kTwCrps: {
      const ChainingFunction v = s.chaining ? *s.chaining : *canonical_chaining(*s.weight);
      return twcrps(f, r.obs, v);
    }
    case ScoreKind::kOwCrps: return owcrps(f, r.obs, *s.weight);
    case ScoreKind::kOwCrpsBs: return owcrps_bs(f, r.obs, *s.threshold);
    case ScoreKind::kVrCrps: return vrcrps(f, r.obs, *s.weight, s.x0);
    case ScoreKind::kPit: {
      if (const auto* e = std::get_if<Ensemble>(&f)) return e->cdf(r.obs);
      return pit(as_parametric(f), r.obs);
    }
    default: break;
  }
  throw ContractViolation("score_univariate: not a univariate score");
}

inline double score_multivariate(const ScoreSpec& s, const MvCase& c) {
  const EnsembleOptions opt{.fair = s.fair};
  const auto& e = c.ensemble;
  const std::span<const double> y = c.obs;
  switch (s.kind) {
    case ScoreKind::kEs: return energy_score(e, y, opt);
    case ScoreKind::kVs: return variogram_score(e, y, s.variogram, opt);
    case ScoreKind::kTwEs: {
      const ChainingFunction v = s.chaining ? *s.chaining : *canonical_chaining(*s.weight);
      return tw_energy_score(e, y, v, opt);
    }
    case ScoreKind::kTwVs: {
      const ChainingFunction v = s.chaining ? *s.chaining : *canonical_chaining(*s.weight);
      return tw_variogram_score(e, y, v, s.variogram, opt);
    }
    case ScoreKind::kOwEs: return ow_energy_score(e, y, *s.weight);
    case ScoreKind::kOwVs: return ow_variogram_score(e, y, *s.weight, s.variogram);
    case ScoreKind::kVrEs: {
      const std::vector<double> x0(e.dims(), s.x0);
      return vr_energy_score(e, y, *s.weight, x0, opt);
    }
    case ScoreKind::kVrVs: {
      VariogramSpec vs = s.variogram;
      if (vs.reference.empty()) vs.reference.assign(e.dims(), s.x0);
      return vr_variogram_score(e, y, *s.weight, vs, opt);
    }
    default: break;
  }
  throw ContractViolation("score_multivariate: not a multivariate score");
}

inline void check_spec(const ScoreSpec& s) {
  const bool tw = s.kind == ScoreKind::kTwCrps || s.kind == ScoreKind::kTwEs || s.kind == ScoreKind::kTwVs;
  if (tw && !s.chaining && s.weight && !canonical_chaining(*s.weight)) {
    throw Unsupported(s.label + ": no closed-form chaining for this weight; give a 'chaining' instead");
  }
  if (!tw && (s.kind == ScoreKind::kOwCrps || s.kind == ScoreKind::kVrCrps || s.kind == ScoreKind::kOwEs ||
              s.kind == ScoreKind::kOwVs || s.kind == ScoreKind::kVrEs || s.kind == ScoreKind::kVrVs) &&
      !s.weight) {
    throw DataError(s.label + ": needs a 'weight'");
  }
}

}  // namespace detail

/// Means per group and overall, per score. Records are reduced in key
/// order, so the result does not depend on input row order.
inline std::vector<GroupMean> group_means(std::vector<ScoreRecord> records, const std::vector<std::string>& keys) {
  std::sort(records.begin(), records.end(), [](const ScoreRecord& a, const ScoreRecord& b) { return a.key() < b.key(); });
  struct Acc {
    detail::NeumaierSum sum;
    std::size_t n = 0;
  };
  std::map<std::string, std::map<std::string, Acc>> by_score;
  std::vector<std::string> score_order;
  for (const auto& r : records) {
    if (!by_score.count(r.score)) score_order.push_back(r.score);
    auto& groups = by_score[r.score];
    for (const std::string& g : {std::string("all"), keys.empty() ? std::string() : detail::group_of(r, keys)}) {
      if (g.empty()) continue;
      groups[g].sum.add(r.value);
      ++groups[g].n;
    }
  }
  std::vector<GroupMean> out;
  for (const auto& [score, groups] : by_score) {
    std::vector<std::string> names;
    for (const auto& [g, acc] : groups) {
      if (g != "all") names.push_back(g);
    }
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      const auto va = a.substr(a.find('=') + 1), vb = b.substr(b.find('=') + 1);
      return detail::natural_less(va, vb) || (!detail::natural_less(vb, va) && a < b);
    });
    names.push_back("all");
    for (const auto& g : names) {
      const auto& acc = groups.at(g);
      out.push_back({score, g, acc.n, acc.sum.value() / static_cast<double>(acc.n)});
    }
  }
  return out;
}

/// Per-case scores for every requested score, then grouped means.
inline ScoreTable score_archive(const Archive& a, const std::vector<ScoreSpec>& specs, const ScoreOptions& opt = {}) {
  ScoreTable t;
  for (const auto& s : specs) {
    detail::check_spec(s);
    if (!is_multivariate(s.kind)) {
      for (const auto& r : a.records) {
        try {
          t.records.push_back(
              {s.label, r.station_id, r.init_date, std::to_string(r.lead_time), detail::score_univariate(s, r, opt.smooth)});
        } catch (const Unsupported& e) {
          throw Unsupported(s.label + ": " + e.what());
        }
      }
      continue;
    }
    std::string lead;
    for (int l : s.leads) lead += (lead.empty() ? "" : "+") + std::to_string(l);
    for (const auto& c : multivariate_cases(a, s.leads)) {
      t.records.push_back({s.label, c.station_id, c.init_date, lead, detail::score_multivariate(s, c)});
    }
  }
  t.groups = group_means(t.records, opt.aggregate_by);
  return t;
}

// ---------------------------------------------------------------------------
// Skill scores
// ---------------------------------------------------------------------------

/// 1 - score/reference; empty when the reference is zero.
inline std::optional<double> skill_score(double score, double reference) {
  if (reference == 0.0 || !std::isfinite(reference)) return std::nullopt;
  return 1.0 - score / reference;
}

struct SkillRow {
  std::string score;
  std::string group;
  std::size_t n = 0;
  double value = 0.0;
  double reference = 0.0;
  /// NaN when undefined.
  double skill = 0.0;
  bool undefined = false;
};

/// Skill per score and group against a reference table over the same cases.
inline std::vector<SkillRow> skill_table(const ScoreTable& scores, const ScoreTable& ref) {
  const auto keys = [](const ScoreTable& t) {
    std::set<std::tuple<std::string, std::string, std::string, std::string>> k;
    for (const auto& r : t.records) k.emplace(r.score, r.station_id, r.init_date, r.lead);
    return k;
  };
  if (keys(scores) != keys(ref)) {
    throw DataError("skill_table: forecast and reference tables do not cover the same cases");
  }
  std::map<std::pair<std::string, std::string>, const GroupMean*> ref_by;
  for (const auto& g : ref.groups) ref_by[{g.score, g.group}] = &g;
  std::vector<SkillRow> out;
  for (const auto& g : scores.groups) {
    const auto it = ref_by.find({g.score, g.group});
    if (it == ref_by.end()) throw DataError("skill_table: reference lacks group " + g.score + "/" + g.group);
    SkillRow row{g.score, g.group, g.n, g.mean, it->second->mean, 0.0, false};
    const auto s = skill_score(g.mean, row.reference);
    row.undefined = !s;
    row.skill = s ? *s : std::nan("");
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tables as CSV
// ---------------------------------------------------------------------------

inline std::string records_csv(const std::vector<ScoreRecord>& records) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"score", "station_id", "init_date", "lead_time", "value"});
  for (const auto& r : records) w.row({r.score, r.station_id, r.init_date, r.lead, format_double(r.value)});
  return os.str();
}

inline std::string records_jsonl(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += "{\"score\":" + json(r.score).dump() + ",\"station_id\":" + json(r.station_id).dump() +
           ",\"init_date\":" + json(r.init_date).dump() + ",\"lead_time\":" + json(r.lead).dump() +
           ",\"value\":" + format_double(r.value) + "}\n";
  }
  return out;
}

inline std::string groups_csv(const std::vector<GroupMean>& groups) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"score", "group", "n", "mean"});
  for (const auto& g : groups) w.row({g.score, g.group, std::to_string(g.n), format_double(g.mean)});
  return os.str();
}

inline std::string skill_csv(const std::vector<SkillRow>& rows) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"score", "group", "n", "value", "reference", "skill", "undefined"});
  for (const auto& r : rows) {
    w.row({r.score, r.group, std::to_string(r.n), format_double(r.value), format_double(r.reference),
           r.undefined ? "" : format_double(r.skill), r.undefined ? "1" : "0"});
  }
  return os.str();
}

/// Wide grid: one row per group, one column per score with its skill.
inline std::string skill_grid_csv(const std::vector<SkillRow>& rows) {
  std::vector<std::string> scores, groups;
  std::map<std::pair<std::string, std::string>, const SkillRow*> at;
  for (const auto& r : rows) {
    if (std::find(scores.begin(), scores.end(), r.score) == scores.end()) scores.push_back(r.score);
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
    at[{r.group, r.score}] = &r;
  }
  std::ostringstream os;
  CsvWriter w(os);
  std::vector<std::string> head = {"group"};
  for (const auto& s : scores) {
    head.push_back(s);
    head.push_back(s + ":reference");
    head.push_back(s + ":skill");
  }
  w.row(head);
  for (const auto& g : groups) {
    std::vector<std::string> row = {g};
    for (const auto& s : scores) {
      const auto it = at.find({g, s});
      if (it == at.end()) {
        row.insert(row.end(), {"", "", ""});
        continue;
      }
      row.push_back(format_double(it->second->value));
      row.push_back(format_double(it->second->reference));
      row.push_back(it->second->undefined ? "" : format_double(it->second->skill));
    }
    w.row(row);
  }
  return os.str();
}

}  // namespace wxverif::io
