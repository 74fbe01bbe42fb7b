#include "doctest.h"

#include "vcsim/error.hpp"
#include "vcsim/scenario.hpp"

#include <string>

using namespace vcsim;

#ifndef VCSIM_DATA_DIR
#error "VCSIM_DATA_DIR must point at the data directory"
#endif

namespace {

std::string config_error_code(const std::string &yaml) {
  try {
    parse_scenario(yaml);
  } catch (const ConfigError &e) {
    return e.code();
  }
  return "";
}

} // namespace

TEST_CASE("built-in profile carries the published levels") {
  const Scenario s = case_study_profile();
  REQUIRE(s.firm.fgi.size() == 3);
  CHECK(s.firm.fgi[0].initial == 500.0);
  CHECK(s.firm.fgi[1].initial == 500.0);
  CHECK(s.firm.fgi[2].initial == 300.0);
  for (const auto &r : s.firm.raw)
    CHECK(r.initial == 200.0);
  CHECK(s.firm.daily_capacity == 185.0);
  CHECK(s.retailer.deliver_interval == 2.0);
  CHECK(s.retailer.source_interval == 2.5);
  CHECK(s.firm.deliver_interval == 2.5);
  CHECK(s.firm.source_interval == 3.0);
  CHECK(s.firm.make_interval == 3.0);
  for (const auto &sup : s.suppliers) {
    CHECK(sup.deliver_interval == 4.0);
    CHECK(sup.source_interval == 4.0);
  }
  CHECK(s.suppliers.size() == 3);
  CHECK(s.raw(1).producers == std::vector<std::string>{"supplier1", "supplier2"});
  CHECK(s.raw(2).producers == std::vector<std::string>{"supplier2"});
  CHECK(s.raw(3).producers == std::vector<std::string>{"supplier3"});
  CHECK(s.horizon == 48.0);
  CHECK_NOTHROW(validate(s));
  CHECK_NOTHROW(validate(case_study_profile(RunMode::kVcor)));
}

TEST_CASE("an empty scenario file is the built-in profile") {
  const Scenario s = parse_scenario("{}");
  CHECK(s == case_study_profile());
}

TEST_CASE("semantic validation codes") {
  CHECK(config_error_code("satisfaction: {alpha: 1.5}") == "forgetting_factor_out_of_range");
  CHECK(config_error_code("mode: scor\nvcor: {support: true}") == "mode_consistency");
  CHECK(config_error_code("firm:\n  fgi:\n    - {item: 1, initial: 5, reorder_point: 9, "
                          "order_up_to: 9}\n") == "reorder_point_not_below_order_up_to");
  Scenario bad = case_study_profile();
  bad.products[0].bom = {{9, 1.0}};
  try {
    validate(bad);
    FAIL("expected error");
  } catch (const ConfigError &e) {
    CHECK(e.code() == "unknown_raw");
  }
  try {
    parse_scenario("satisfaction: {alpha: 1.5}");
  } catch (const ConfigError &e) {
    CHECK(std::string(e.what()).find("forgetting factor out of range") != std::string::npos);
  }
}

TEST_CASE("malformed YAML reports a parse error") {
  CHECK(config_error_code("horizon_hours: [1, 2") == "parse_error");
}

TEST_CASE("overrides merge over the profile") {
  const Scenario s = parse_scenario("seed: 99\nhorizon_hours: 24\nfirm: {daily_capacity: 100}\n");
  CHECK(s.seed == 99);
  CHECK(s.horizon == 24.0);
  CHECK(s.firm.daily_capacity == 100.0);
  CHECK(s.firm.make_interval == 3.0);
}

TEST_CASE("serialization round-trips") {
  for (RunMode m : {RunMode::kScor, RunMode::kVcor}) {
    const Scenario s = case_study_profile(m);
    const Scenario back = parse_scenario(serialize_scenario(s));
    CHECK(back == s);
    CHECK(scenario_digest(back) == scenario_digest(s));
  }
  const Scenario golden = load_scenario(VCSIM_GOLDEN_DIR "/micro.yaml");
  CHECK(parse_scenario(serialize_scenario(golden)) == golden);
}

TEST_CASE("digest changes with the scenario") {
  Scenario a = case_study_profile();
  Scenario b = a;
  b.seed = a.seed + 1;
  CHECK(scenario_digest(a) != scenario_digest(b));
}

TEST_CASE("force mode") {
  Scenario s = case_study_profile();
  force_mode(s, RunMode::kVcor);
  CHECK(s.vcor == VcorToggles::all());
  force_mode(s, RunMode::kScor);
  CHECK_FALSE(s.vcor.any());
}

TEST_CASE("case-study demand file matches the built-in table") {
  const DemandTable t = load_demand_table(VCSIM_DATA_DIR "/case_study_demand.csv");
  CHECK(t == builtin_demand_table());
  CHECK(t.boxes(1, 2, 6) == 850.0);
  for (int m = 1; m <= 12; ++m)
    CHECK(t.boxes(2, 2, m) == 0.0);
  CHECK(t.boxes(1, 1, 1) == 250.0);
}

TEST_CASE("demand table parsing") {
  const std::string header = "customer,product,M1,M2,M3,M4,M5,M6,M7,M8,M9,M10,M11,M12\n";
  const DemandTable t = parse_demand_table(header + "1,1,1,2,3,4,5,6,7,8,9,10,11,12\n"
                                                    "2,1,-,-,-,-,-,-,-,-,-,-,-,-\n");
  CHECK(t.boxes(1, 1, 12) == 12.0);
  CHECK(t.boxes(2, 1, 5) == 0.0);
  CHECK(t.boxes(3, 3, 1) == 0.0);
  CHECK(parse_demand_table(serialize_demand_table(t)) == t);

  try {
    parse_demand_table(header + "1,1,1,2,3,4,5,6,7,8,9,10,11\n");
    FAIL("expected error");
  } catch (const ConfigError &e) {
    CHECK(e.code() == "parse_error");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("a scenario may point at a demand file") {
  const Scenario s = parse_scenario("demand_table: case_study_demand.csv\n", VCSIM_DATA_DIR);
  CHECK(s.demand == builtin_demand_table());
  CHECK_THROWS_AS(parse_scenario("demand_table: missing.csv\n", VCSIM_DATA_DIR), Error);
}

TEST_CASE("missing scenario file is an I/O error") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), IoError);
}
