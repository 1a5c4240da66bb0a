// Command-line front end: parses flags, folds them into the run
// configuration, dispatches the task and maps errors to exit codes.

#include "wxverif/io/config.hpp"
#include "wxverif/io/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using wxverif::io::json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  bool smooth = false;
  std::string input;
  std::string reference;
  std::string stations;
  std::vector<double> thresholds;
  std::vector<std::string> scores;
  std::string experiment;
  std::optional<std::size_t> n;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration, or a manifest from an earlier run");
  sub->add_option("--seed", f.seed, "master seed (u64)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--format", f.format, "archive/score output format")->check(CLI::IsMember({"csv", "jsonl"}));
  sub->add_flag("--smooth", f.smooth, "replace each ensemble by its normal fit before scoring");
  sub->add_option("--threshold", f.thresholds, "heat thresholds (repeatable; default 25 27)");
}

void add_input(CLI::App* sub, Flags& f) {
  sub->add_option("--input,-i", f.input, "forecast archive (.csv or .jsonl)");
}

// Config file first, then flags on top; the merged document is what the
// manifest records.
json merged_document(const std::string& task, const Flags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    doc = json::parse(wxverif::io::read_file(f.config), nullptr, false);
    if (doc.is_discarded()) throw wxverif::DataError("config: '" + f.config + "' is not valid JSON");
    if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) doc = doc["config"];
  }
  if (!doc.is_object()) throw wxverif::DataError("config: top level must be a JSON object");
  if (doc.contains("task") && doc["task"] != task) {
    throw wxverif::ContractViolation("config task '" + doc["task"].get<std::string>() +
                                     "' does not match subcommand '" + task + "'");
  }
  doc["task"] = task;
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.out.empty()) doc["output"] = f.out;
  if (!f.format.empty()) doc["format"] = f.format;
  if (f.smooth) doc["smooth"] = true;
  if (!f.input.empty()) doc["input"] = f.input;
  if (!f.reference.empty()) doc["reference"] = f.reference;
  if (!f.stations.empty()) doc["stations"] = f.stations;
  if (!f.thresholds.empty()) doc["thresholds"] = f.thresholds;
  if (!f.scores.empty()) doc["scores"] = f.scores;
  if (!f.experiment.empty() || f.n) {
    json& e = doc["experiment"];
    if (!e.is_object()) e = json::object();
    if (!f.experiment.empty()) e["name"] = f.experiment;
    if (f.n) e["n"] = *f.n;
  }
  return doc;
}

void print_error(const char* category, const std::string& message) {
  std::cerr << json{{"error", category}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wxverif: weighted verification of weather forecasts"};
  app.require_subcommand(1);
  Flags f;

  auto* score = app.add_subcommand("score", "score an archive; per-case scores and grouped means");
  add_common(score, f);
  add_input(score, f);
  score->add_option("--score", f.scores, "score names (repeatable), e.g. crps twcrps owcrps_bs es");

  auto* diagnose = app.add_subcommand("diagnose", "rank/PIT and conditional PIT histograms, CORP reliability");
  add_common(diagnose, f);
  add_input(diagnose, f);

  auto* post = app.add_subcommand("postprocess", "EMOS with a rolling window, then ensemble copula coupling");
  add_common(post, f);
  add_input(post, f);
  post->add_option("--stations", f.stations, "station metadata CSV (station_id,tpi,mhd,altitude,latitude)");

  auto* synth = app.add_subcommand("synth", "synthetic experiments");
  add_common(synth, f);
  synth->add_option("experiment", f.experiment, "fig1 | fig2 | fig3 | propriety | impropriety");
  synth->add_option("-n", f.n, "sample size (grid size for fig1)");

  auto* report = app.add_subcommand("report", "skill of an archive against a reference archive");
  add_common(report, f);
  add_input(report, f);
  report->add_option("--reference", f.reference, "reference archive (e.g. raw ensemble)");
  report->add_option("--score", f.scores, "score names (repeatable); default crps es vs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? wxverif::io::kExitOk : wxverif::io::kExitUsage;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = wxverif::io::parse_config(merged_document(task, f));
    const auto rep = wxverif::io::run(cfg);
    std::cout << json{{"status", "ok"}, {"task", task}, {"output", cfg.output}, {"results", rep.results}}.dump()
              << "\n";
    return wxverif::io::kExitOk;
  } catch (const wxverif::Error& e) {
    print_error(e.category(), e.what());
    return wxverif::io::exit_code_for(e);
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return wxverif::io::kExitData;
  }
}
