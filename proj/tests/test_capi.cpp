// Exercises the shared-library surface the way an external caller would:
// only the public C header, opaque handles and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "contdef/contdef.h"

namespace {

const char* kSmallScenario = R"({
  "name": "line4",
  "n": 1,
  "agents": [
    {"id": 1, "role": "leader", "position": [0.0, 0.0, 0.0]},
    {"id": 2, "role": "leader", "position": [10.0, 0.0, 0.0]},
    {"id": 3, "role": "follower", "position": [4.0, 0.0, 0.0]},
    {"id": 4, "role": "follower", "position": [6.0, 0.0, 0.0]}
  ],
  "comm_graph": {"3": [1, 4], "4": [3, 2]},
  "safety": {"epsilon": 0.3, "mode": "conservative", "delta": 0.4},
  "plan": {
    "mode": "of",
    "duration": 6.0,
    "end_features": {"stretch": [1.2, 1.0, 1.0], "rotation": [0.0, 0.0, 0.0],
                     "offset": [3.0, 0.0, 0.0]}
  },
  "timing": {"dt": 0.01, "output_stride": 5}
})";

}  // namespace

TEST_CASE("status plumbing") {
  CHECK(std::string(cd_version()).find("contdef") != std::string::npos);
  CHECK(std::string(cd_status_name(CD_E_NO_PATH)) == "NoPath");
  CHECK(cd_scenario_parse(nullptr, nullptr) == CD_E_INVALID_ARGUMENT);

  cd_scenario* scenario = nullptr;
  CHECK(cd_scenario_parse("{ nope", &scenario) == CD_E_PARSE);
  CHECK(std::string(cd_last_error_message()).size() > 0);
  CHECK(cd_scenario_builtin("unknown", &scenario) == CD_E_SCHEMA);
}

TEST_CASE("builtin scenario and weights") {
  cd_scenario* scenario = nullptr;
  REQUIRE(cd_scenario_builtin("table2", &scenario) == CD_OK);

  int pass = 0;
  char* report = nullptr;
  REQUIRE(cd_scenario_validate(scenario, &pass, &report) == CD_OK);
  CHECK(pass == 1);
  CHECK(std::string(report).find("PASS") != std::string::npos);
  cd_string_free(report);

  double d_s = 0.0, theta = 0.0, psi = 0.0;
  int a = 0, b = 0;
  REQUIRE(cd_reference_metrics(scenario, &d_s, nullptr, nullptr, &theta, &psi, &a, &b) == CD_OK);
  CHECK(std::abs(d_s - 4.6607) < 0.005);
  CHECK(((a == 9 && b == 13) || (a == 13 && b == 9)));

  cd_weights* weights = nullptr;
  REQUIRE(cd_compute_weights(scenario, &weights) == CD_OK);
  int count = 0;
  CHECK(cd_weights_follower_count(weights, &count) == CD_OK);
  CHECK(count == 12);
  double row[4];
  REQUIRE(cd_weights_leader_map_row(weights, 14, row, 4) == CD_OK);
  CHECK(row[0] == doctest::Approx(-0.5).epsilon(1e-9));
  double w = 0.0;
  REQUIRE(cd_weights_real_weight(weights, 5, 1, &w) == CD_OK);
  CHECK(w == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(cd_weights_real_weight(weights, 5, 2, &w) == CD_E_MISSING_NEIGHBOR);
  double abscissa = 1.0;
  REQUIRE(cd_weights_spectral_abscissa(weights, &abscissa) == CD_OK);
  CHECK(abscissa < 0.0);
  cd_weights_free(weights);
  cd_scenario_free(scenario);
}

TEST_CASE("plan, simulate and certify a small scenario") {
  cd_scenario* scenario = nullptr;
  REQUIRE(cd_scenario_parse(kSmallScenario, &scenario) == CD_OK);

  cd_plan* plan = nullptr;
  REQUIRE(cd_plan_build(scenario, &plan) == CD_OK);
  double duration = 0.0;
  CHECK(cd_plan_total_duration(plan, &duration) == CD_OK);
  CHECK(duration == doctest::Approx(6.0));

  char* plan_json = nullptr;
  REQUIRE(cd_plan_to_json(plan, &plan_json) == CD_OK);
  cd_plan* reparsed = nullptr;
  CHECK(cd_plan_parse(plan_json, &reparsed) == CD_OK);
  cd_plan_free(reparsed);
  cd_string_free(plan_json);

  char* features = nullptr;
  REQUIRE(cd_plan_features_csv(scenario, plan, 0.5, &features) == CD_OK);
  CHECK(std::string(features).rfind("time,lambda1", 0) == 0);
  cd_string_free(features);

  cd_trajectory* traj = nullptr;
  REQUIRE(cd_simulate(scenario, plan, &traj) == CD_OK);
  double sup = 1.0, min_sep = 0.0;
  REQUIRE(cd_trajectory_stats(traj, &sup, nullptr, nullptr, &min_sep) == CD_OK);
  CHECK(sup < 0.05);
  CHECK(min_sep > 0.6);
  char* csv = nullptr;
  REQUIRE(cd_trajectory_csv(traj, &csv) == CD_OK);
  CHECK(std::string(csv).rfind("time,agent", 0) == 0);
  cd_string_free(csv);

  cd_report* report = nullptr;
  REQUIRE(cd_certify(scenario, plan, traj, &report) == CD_OK);
  int pass = 0;
  CHECK(cd_report_pass(report, &pass) == CD_OK);
  CHECK(pass == 1);
  char* text = nullptr;
  REQUIRE(cd_report_text(report, &text) == CD_OK);
  CHECK(std::string(text).find("bounded deviation") != std::string::npos);
  cd_string_free(text);

  cd_report_free(report);
  cd_trajectory_free(traj);
  cd_plan_free(plan);
  cd_scenario_free(scenario);
}

TEST_CASE("leader table decomposition through the C surface") {
  cd_scenario* scenario = nullptr;
  REQUIRE(cd_scenario_parse(kSmallScenario, &scenario) == CD_OK);
  const char* table =
      "time,x1,y1,z1,x2,y2,z2\n"
      "0.0,0,0,0,10,0,0\n"
      "1.0,3,0,0,15,0,0\n";
  char* csv = nullptr;
  REQUIRE(cd_decompose_leader_csv(scenario, table, &csv) == CD_OK);
  // Second row: stretch 1.2, offset 3.
  std::string text(csv);
  CHECK(text.find("\n1,1.2,") != std::string::npos);
  cd_string_free(csv);
  cd_scenario_free(scenario);
}
