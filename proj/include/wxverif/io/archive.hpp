#pragma once

#include "wxverif/core/errors.hpp"
#include "wxverif/core/forecast.hpp"
#include "wxverif/io/format.hpp"
#include "wxverif/postprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace wxverif::io {

enum class Format { kCsv, kJsonl };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::kCsv;
  if (s == "jsonl") return Format::kJsonl;
  return std::nullopt;
}

inline const char* to_string(Format f) { return f == Format::kCsv ? "csv" : "jsonl"; }

/// One forecast case: an ensemble (one member for a deterministic forecast)
/// issued at init_date for init_date + lead_time days, and its observation.
struct ArchiveRecord {
  std::string station_id;
  std::string init_date;
  int lead_time = 0;
  std::vector<double> members;
  double obs = 0.0;

  auto key() const { return std::tie(station_id, init_date, lead_time); }
};

struct Archive {
  /// 0 while the archive is empty.
  std::size_t member_count = 0;
  std::vector<ArchiveRecord> records;
};

struct Reject {
  std::size_t line = 0;  // 1-based line in the input
  std::string reason;
  std::string text;
};

struct IngestResult {
  Archive archive;
  std::vector<Reject> rejects;
  std::size_t rows_read = 0;
};

struct IngestOptions {
  /// Abort when rejects exceed this fraction of data rows.
  double reject_threshold = 0.01;
};

/// YYYY-MM-DD, optionally followed by 'T' or ' ' and a time of day.
inline bool valid_iso_date(std::string_view s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  long long y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(y)),
                                        std::chrono::month(static_cast<unsigned>(m)),
                                        std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok()) return false;
  if (s.size() == 10) return true;
  return s[10] == 'T' || s[10] == ' ';
}

/// Days since 1970-01-01 of an ISO date (time of day ignored).
inline std::int64_t day_number(std::string_view s) {
  if (!valid_iso_date(s)) throw DataError("not an ISO-8601 date: '" + std::string(s) + "'");
  long long y = 0, m = 0, d = 0;
  parse_int(s.substr(0, 4), y);
  parse_int(s.substr(5, 2), m);
  parse_int(s.substr(8, 2), d);
  const std::chrono::sys_days days = std::chrono::year_month_day{
      std::chrono::year(static_cast<int>(y)), std::chrono::month(static_cast<unsigned>(m)),
      std::chrono::day(static_cast<unsigned>(d))};
  return days.time_since_epoch().count();
}

namespace detail {

// Returns the reason a record is invalid, empty when it is fine.
inline std::string validate_record(const ArchiveRecord& r) {
  if (r.station_id.empty()) return "empty station_id";
  if (!valid_iso_date(r.init_date)) return "init_date is not an ISO-8601 date";
  if (r.lead_time < 0) return "negative lead_time";
  if (r.members.empty()) return "no member values";
  for (double x : r.members) {
    if (!std::isfinite(x)) return "non-finite member value";
  }
  if (!std::isfinite(r.obs)) return "non-finite observation";
  return {};
}

inline void finish(IngestResult& res, const IngestOptions& opt, const std::string& source) {
  std::set<std::tuple<std::string, std::string, int>> seen;
  std::vector<ArchiveRecord> kept;
  kept.reserve(res.archive.records.size());
  for (auto& r : res.archive.records) {
    if (!seen.emplace(r.station_id, r.init_date, r.lead_time).second) {
      res.rejects.push_back({0, "duplicate (station_id, init_date, lead_time)",
                             r.station_id + "," + r.init_date + "," + std::to_string(r.lead_time)});
      continue;
    }
    kept.push_back(std::move(r));
  }
  res.archive.records = std::move(kept);
  std::sort(res.archive.records.begin(), res.archive.records.end(),
            [](const ArchiveRecord& a, const ArchiveRecord& b) { return a.key() < b.key(); });
  if (res.rows_read > 0 &&
      static_cast<double>(res.rejects.size()) > opt.reject_threshold * static_cast<double>(res.rows_read)) {
    std::ostringstream os;
    os << source << ": " << res.rejects.size() << " of " << res.rows_read
       << " rows rejected, above the reject threshold of " << opt.reject_threshold * 100.0 << "%";
    if (!res.rejects.empty()) os << " (first: line " << res.rejects.front().line << ", " << res.rejects.front().reason << ")";
    throw DataError(os.str());
  }
}

// Accepts the record unless its member count disagrees with the archive.
inline void accept(IngestResult& res, ArchiveRecord rec, std::size_t line, const std::string& text) {
  if (auto why = validate_record(rec); !why.empty()) {
    res.rejects.push_back({line, std::move(why), text});
    return;
  }
  auto& a = res.archive;
  if (a.member_count == 0) a.member_count = rec.members.size();
  if (rec.members.size() != a.member_count) {
    res.rejects.push_back({line, "member count differs from the archive's " + std::to_string(a.member_count), text});
    return;
  }
  a.records.push_back(std::move(rec));
}

}  // namespace detail

/// CSV with a one-line header naming station_id, init_date, lead_time, obs
/// and either value or m1..mK, in any column order.
inline IngestResult ingest_csv(std::string_view text, const IngestOptions& opt = {},
                               const std::string& source = "archive") {
  IngestResult res;
  std::size_t pos = 0, line_no = 0;
  std::vector<std::string> header;
  int col_station = -1, col_date = -1, col_lead = -1, col_obs = -1;
  std::vector<int> member_cols;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (header.empty()) {
      header = cells;
      std::map<std::string, int> idx;
      for (std::size_t i = 0; i < header.size(); ++i) idx[header[i]] = static_cast<int>(i);
      const auto need = [&](const char* name) {
        auto it = idx.find(name);
        if (it == idx.end()) throw DataError(source + ": missing column '" + name + "'");
        return it->second;
      };
      col_station = need("station_id");
      col_date = need("init_date");
      col_lead = need("lead_time");
      col_obs = need("obs");
      if (auto it = idx.find("value"); it != idx.end()) {
        member_cols.push_back(it->second);
      } else {
        for (int k = 1;; ++k) {
          auto m = idx.find("m" + std::to_string(k));
          if (m == idx.end()) break;
          member_cols.push_back(m->second);
        }
      }
      if (member_cols.empty()) throw DataError(source + ": missing member columns (value or m1..mK)");
      continue;
    }
    ++res.rows_read;
    const std::string raw(line);
    if (cells.size() != header.size()) {
      res.rejects.push_back({line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                          std::to_string(cells.size()), raw});
      continue;
    }
    ArchiveRecord rec;
    rec.station_id = cells[col_station];
    rec.init_date = cells[col_date];
    long long lead = 0;
    if (!parse_int(cells[col_lead], lead)) {
      res.rejects.push_back({line_no, "unparseable lead_time", raw});
      continue;
    }
    rec.lead_time = static_cast<int>(lead);
    bool ok = parse_double(cells[col_obs], rec.obs);
    rec.members.resize(member_cols.size());
    for (std::size_t k = 0; ok && k < member_cols.size(); ++k) ok = parse_double(cells[member_cols[k]], rec.members[k]);
    if (!ok) {
      res.rejects.push_back({line_no, "unparseable number", raw});
      continue;
    }
    detail::accept(res, std::move(rec), line_no, raw);
  }
  detail::finish(res, opt, source);
  return res;
}

/// One JSON object per line with station_id, init_date, lead_time, obs and
/// either "members" (array) or "value" (number).
inline IngestResult ingest_jsonl(std::string_view text, const IngestOptions& opt = {},
                                 const std::string& source = "archive") {
  IngestResult res;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    ++res.rows_read;
    const std::string raw(line);
    const auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      res.rejects.push_back({line_no, "not a JSON object", raw});
      continue;
    }
    for (const char* key : {"station_id", "init_date", "lead_time", "obs"}) {
      if (!j.contains(key)) throw DataError(source + ": line " + std::to_string(line_no) + " lacks field '" + key + "'");
    }
    // NaN is not JSON; null stands for a missing value and is rejected.
    const auto number = [](const nlohmann::json& v, double& out) {
      if (!v.is_number()) return false;
      out = v.get<double>();
      return true;
    };
    ArchiveRecord rec;
    bool ok = j["station_id"].is_string() && j["init_date"].is_string() && j["lead_time"].is_number_integer();
    if (ok) {
      rec.station_id = j["station_id"].get<std::string>();
      rec.init_date = j["init_date"].get<std::string>();
      rec.lead_time = j["lead_time"].get<int>();
      ok = number(j["obs"], rec.obs);
    }
    if (ok && j.contains("members") && j["members"].is_array()) {
      for (const auto& v : j["members"]) {
        double x = 0.0;
        ok = ok && number(v, x);
        rec.members.push_back(x);
      }
    } else if (ok && j.contains("value")) {
      double x = 0.0;
      ok = number(j["value"], x);
      rec.members.push_back(x);
    } else if (ok) {
      throw DataError(source + ": line " + std::to_string(line_no) + " lacks 'members' or 'value'");
    }
    if (!ok) {
      res.rejects.push_back({line_no, "field of the wrong type or missing value", raw});
      continue;
    }
    detail::accept(res, std::move(rec), line_no, raw);
  }
  detail::finish(res, opt, source);
  return res;
}

inline IngestResult ingest(const std::string& path, Format format, const IngestOptions& opt = {}) {
  const std::string text = read_file(path);
  return format == Format::kCsv ? ingest_csv(text, opt, path) : ingest_jsonl(text, opt, path);
}

/// Format from the file extension: .jsonl selects JSONL, anything else CSV.
inline Format format_of(const std::string& path) {
  return path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl" ? Format::kJsonl : Format::kCsv;
}

inline std::string emit_csv(const Archive& a) {
  std::ostringstream os;
  CsvWriter w(os);
  std::vector<std::string> head = {"station_id", "init_date", "lead_time"};
  if (a.member_count == 1) {
    head.push_back("value");
  } else {
    for (std::size_t k = 1; k <= a.member_count; ++k) head.push_back("m" + std::to_string(k));
  }
  head.push_back("obs");
  w.row(head);
  for (const auto& r : a.records) {
    std::vector<std::string> row = {r.station_id, r.init_date, std::to_string(r.lead_time)};
    for (double x : r.members) row.push_back(format_double(x));
    row.push_back(format_double(r.obs));
    w.row(row);
  }
  return os.str();
}

inline std::string emit_jsonl(const Archive& a) {
  std::string out;
  for (const auto& r : a.records) {
    // Numbers are spliced in as text so they keep the shortest round-trip form.
    std::string members;
    for (std::size_t k = 0; k < r.members.size(); ++k) {
      if (k) members += ',';
      members += format_double(r.members[k]);
    }
    out += "{\"station_id\":" + nlohmann::json(r.station_id).dump() + ",\"init_date\":" +
           nlohmann::json(r.init_date).dump() + ",\"lead_time\":" + std::to_string(r.lead_time) +
           ",\"members\":[" + members + "],\"obs\":" + format_double(r.obs) + "}\n";
  }
  return out;
}

inline std::string emit(const Archive& a, Format f) { return f == Format::kCsv ? emit_csv(a) : emit_jsonl(a); }

inline std::string rejects_csv(const std::vector<Reject>& rejects) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"line", "reason", "text"});
  for (const auto& r : rejects) w.row({std::to_string(r.line), r.reason, r.text});
  return os.str();
}

// ---------------------------------------------------------------------------
// Multivariate cases and station metadata
// ---------------------------------------------------------------------------

/// The forecasts of one (station, init_date) at several lead times, as a
/// d x m ensemble with one dimension per lead time.
struct MvCase {
  std::string station_id;
  std::string init_date;
  MvEnsemble ensemble;
  std::vector<double> obs;
};

/// Cases holding every lead time in `leads`, in key order; others are skipped.
inline std::vector<MvCase> multivariate_cases(const Archive& a, const std::vector<int>& leads) {
  require(!leads.empty(), "multivariate_cases: needs at least one lead time");
  std::map<std::pair<std::string, std::string>, std::map<int, const ArchiveRecord*>> groups;
  for (const auto& r : a.records) groups[{r.station_id, r.init_date}][r.lead_time] = &r;
  std::vector<MvCase> out;
  const std::size_t d = leads.size();
  for (const auto& [key, by_lead] : groups) {
    if (!std::all_of(leads.begin(), leads.end(), [&](int l) { return by_lead.count(l) > 0; })) continue;
    const std::size_t m = a.member_count;
    std::vector<double> values(d * m);
    std::vector<double> obs(d);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < d; ++i) {
      const auto* r = by_lead.at(leads[i]);
      for (std::size_t j = 0; j < m; ++j) values[j * d + i] = r->members[j];
      obs[i] = r->obs;
      labels.push_back("lead" + std::to_string(leads[i]));
    }
    out.push_back({key.first, key.second, MvEnsemble(d, m, std::move(values), std::move(labels)), std::move(obs)});
  }
  return out;
}

/// Station metadata CSV: station_id, tpi, mhd, altitude, latitude.
inline std::map<std::string, StationMeta> ingest_stations(std::string_view text, const std::string& source = "stations") {
  std::map<std::string, StationMeta> out;
  std::size_t pos = 0, line_no = 0;
  std::vector<int> cols;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cols.empty()) {
      for (const char* name : {"station_id", "tpi", "mhd", "altitude", "latitude"}) {
        auto it = std::find(cells.begin(), cells.end(), name);
        if (it == cells.end()) throw DataError(source + ": missing column '" + name + "'");
        cols.push_back(static_cast<int>(it - cells.begin()));
      }
      continue;
    }
    StationMeta m;
    m.station_id = cells.at(cols[0]);
    if (cells.size() <= static_cast<std::size_t>(*std::max_element(cols.begin(), cols.end())) ||
        !parse_double(cells[cols[1]], m.tpi) || !parse_double(cells[cols[2]], m.mhd) ||
        !parse_double(cells[cols[3]], m.altitude) || !parse_double(cells[cols[4]], m.latitude)) {
      throw DataError(source + ": malformed row at line " + std::to_string(line_no));
    }
    out[m.station_id] = m;
  }
  return out;
}

}  // namespace wxverif::io
