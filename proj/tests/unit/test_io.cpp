#include "doctest.h"

#include "vcsim/chain.hpp"
#include "vcsim/error.hpp"
#include "vcsim/io.hpp"

#include "json.hpp"

#include <filesystem>
#include <sstream>

using namespace vcsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("vcsim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}

} // namespace

TEST_CASE("trace export") {
  const auto r = run_scenario(load_scenario(VCSIM_GOLDEN_DIR "/micro.yaml"));
  const auto ls = lines(trace_jsonl(r.artifacts));
  REQUIRE(ls.size() == r.artifacts.trace.size() + 1);
  const auto head = nlohmann::json::parse(ls.front());
  CHECK(head.at("scenario_digest") == r.artifacts.scenario_digest);
  CHECK(head.at("seed") == 7);
  const auto first = nlohmann::json::parse(ls[1]);
  CHECK(first.at("fire_time") == 2.0);
  CHECK(first.at("sequence_no") == 0);
  CHECK(first.at("target") == "retailer");
  CHECK(first.at("kind") == "activate-deliver");
  CHECK(first.contains("payload_digest"));
}

TEST_CASE("ledger export replays to the same state") {
  Scenario s = case_study_profile(RunMode::kVcor);
  s.retailer.support.defective_probability = 0.5;
  const auto r = run_scenario(s);
  const std::string text = ledger_jsonl(r.artifacts.ledger, r.artifacts.scenario_digest, s.seed);
  const Ledger back = parse_ledger_jsonl(text);
  CHECK(back.same_state(r.artifacts.ledger));
  CHECK_FALSE(back.tickets().empty());
}

TEST_CASE("malformed ledger lines name the line") {
  const auto r = run_scenario(load_scenario(VCSIM_GOLDEN_DIR "/micro.yaml"));
  std::string text = ledger_jsonl(r.artifacts.ledger, "d", 1);
  text += "{not json}\n";
  try {
    parse_ledger_jsonl(text);
    FAIL("expected error");
  } catch (const ValidationError &e) {
    CHECK(e.code() == "parse_error");
    CHECK(std::string(e.what()).find("line " + std::to_string(lines(text).size())) !=
          std::string::npos);
  }
}

TEST_CASE("KPI report round-trips through JSON") {
  const auto r = run_scenario(case_study_profile(RunMode::kVcor));
  const std::string text = kpi_json(r.report);
  const KpiReport back = parse_kpi_json(text);
  CHECK(kpi_json(back) == text);
  const auto j = nlohmann::ordered_json::parse(text);
  CHECK(j.begin().key() == "scenario_digest");
  CHECK_THROWS_AS(parse_kpi_json("{}"), ValidationError);
}

TEST_CASE("absent KPIs serialize as null") {
  Scenario s = case_study_profile();
  s.horizon = 0.0;
  const auto r = run_scenario(s);
  const auto j = nlohmann::json::parse(kpi_json(r.report));
  bool saw_null = false;
  for (const auto &a : j.at("actors"))
    saw_null = saw_null || a.at("delivery_time").at("mean").is_null();
  CHECK(saw_null);
}

TEST_CASE("plot series carry a provenance line") {
  const auto r = run_scenario(load_scenario(VCSIM_GOLDEN_DIR "/micro.yaml"));
  const std::string prefix = "# scenario_digest=" + r.artifacts.scenario_digest + " seed=7";
  for (const std::string &csv : {satisfaction_csv(r.report), delivery_times_csv(r.report),
                                 stock_levels_csv(r.artifacts)})
    CHECK(lines(csv).front() == prefix);
  const auto d = lines(delivery_times_csv(r.report));
  CHECK(std::find(d.begin(), d.end(), "retailer,3,3.5") != d.end());
}

TEST_CASE("run artifacts on disk") {
  const fs::path dir = scratch("artifacts");
  const Scenario s = case_study_profile();
  const auto r = run_scenario(s);
  write_run_artifacts(dir, r, s);
  for (const char *f : {"trace.jsonl", "ledger.jsonl", "costs.jsonl", "kpi.json",
                        "satisfaction.csv", "delivery_times.csv", "stock_levels.csv",
                        "scenario.yaml"})
    CHECK(fs::exists(dir / f));
  CHECK(kpi_json(read_kpi_report(dir)) == kpi_json(r.report));
  CHECK(load_scenario(dir / "scenario.yaml") == s);
  fs::remove_all(dir);
}

TEST_CASE("comparison files") {
  const auto a = run_scenario(case_study_profile(RunMode::kScor)).report;
  const auto b = run_scenario(case_study_profile(RunMode::kVcor)).report;
  const auto c = compare_runs(a, b);
  const fs::path dir = scratch("compare");
  write_comparison(dir, c);
  const auto csv = lines(read_text_file(dir / "comparison.csv"));
  CHECK(csv.front().rfind("# scor scenario_digest=", 0) == 0);
  CHECK(csv[1] == "key,scor,vcor,delta,ratio,finding");
  const auto j = nlohmann::json::parse(read_text_file(dir / "comparison.json"));
  CHECK(j.at("rows").size() == c.rows.size());
  fs::remove_all(dir);
}

TEST_CASE("I/O failures") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/file"), IoError);
  CHECK_THROWS_AS(read_kpi_report("/nonexistent"), IoError);
}
