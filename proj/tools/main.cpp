// Command-line front end; everything goes through the public C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "contdef/contdef.h"

namespace {

// 0 ok, 1 validation/input failure, 2 safety failure, 3 planner failure.
int exit_code_for(int status) {
  switch (status) {
    case CD_OK:
      return 0;
    case CD_E_NO_PATH:
    case CD_E_INVALID_ENDPOINT:
    case CD_E_INFEASIBLE_SEGMENT:
      return 3;
    case CD_E_GUARD_TRIPPED:
    case CD_E_INPUT_SATURATED:
    case CD_E_TOO_DENSE:
    case CD_E_ANGLES_NOT_CONSTANT:
      return 2;
    default:
      return 1;
  }
}

int fail(int status) {
  std::cerr << "error (" << cd_status_name(status) << "): " << cd_last_error_message() << "\n";
  return exit_code_for(status);
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  ok = true;
  return buffer.str();
}

struct ScenarioHandle {
  cd_scenario* ptr = nullptr;
  ~ScenarioHandle() { cd_scenario_free(ptr); }
};
struct PlanHandle {
  cd_plan* ptr = nullptr;
  ~PlanHandle() { cd_plan_free(ptr); }
};
struct TrajectoryHandle {
  cd_trajectory* ptr = nullptr;
  ~TrajectoryHandle() { cd_trajectory_free(ptr); }
};
struct ReportHandle {
  cd_report* ptr = nullptr;
  ~ReportHandle() { cd_report_free(ptr); }
};
struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { cd_string_free(ptr); }
};

int load_or_build_plan(const cd_scenario* scenario, const std::string& plan_path,
                       cd_plan** out) {
  if (plan_path.empty()) return cd_plan_build(scenario, out);
  bool ok = false;
  const std::string text = read_file(plan_path, ok);
  if (!ok) {
    std::cerr << "error: cannot read plan file " << plan_path << "\n";
    return CD_E_IO;
  }
  return cd_plan_parse(text.c_str(), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leader-follower continuum deformation coordination engine"};
  app.require_subcommand(1);

  std::string scenario_path, plan_path, input_path, output_path, builtin_name;

  CLI::App* validate = app.add_subcommand("validate", "Check the scenario assumptions");
  validate->add_option("scenario", scenario_path, "scenario file")->required();

  CLI::App* weights = app.add_subcommand("weights", "Print communication weight tables");
  weights->add_option("scenario", scenario_path, "scenario file")->required();

  CLI::App* decompose =
      app.add_subcommand("decompose", "Features over time from a leader trajectory table");
  decompose->add_option("scenario", scenario_path, "scenario file")->required();
  decompose->add_option("-i,--input", input_path, "leader trajectory CSV")->required();
  decompose->add_option("-o,--output", output_path, "features CSV (stdout if omitted)");

  CLI::App* plan_cmd = app.add_subcommand("plan", "Build the requested plan");
  plan_cmd->add_option("scenario", scenario_path, "scenario file")->required();
  plan_cmd->add_option("-o,--output", output_path, "plan file (stdout if omitted)");

  CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop team rollout");
  simulate->add_option("scenario", scenario_path, "scenario file")->required();
  simulate->add_option("-p,--plan", plan_path, "plan file (built from the scenario if omitted)");
  simulate->add_option("-o,--output", output_path, "trajectory CSV (stdout if omitted)");

  CLI::App* certify = app.add_subcommand("certify", "Safety certificate for the planned run");
  certify->add_option("scenario", scenario_path, "scenario file")->required();
  certify->add_option("-p,--plan", plan_path, "plan file (built from the scenario if omitted)");

  CLI::App* reproduce = app.add_subcommand("reproduce", "Re-run a bundled case study");
  reproduce->add_option("name", builtin_name, "case study name (table2)")->required();

  CLI11_PARSE(app, argc, argv);

  if (reproduce->parsed()) {
    if (builtin_name != "table2") {
      std::cerr << "error: unknown case study '" << builtin_name << "'\n";
      return 1;
    }
    StringHandle text;
    int pass = 0;
    if (int rc = cd_reproduce_table2(&text.ptr, &pass)) return fail(rc);
    std::cout << text.ptr;
    std::cout << (pass ? "RESULT PASS" : "RESULT FAIL") << "\n";
    return pass ? 0 : 2;
  }

  ScenarioHandle scenario;
  if (int rc = cd_scenario_load(scenario_path.c_str(), &scenario.ptr)) return fail(rc);

  if (validate->parsed()) {
    int pass = 0;
    StringHandle text;
    if (int rc = cd_scenario_validate(scenario.ptr, &pass, &text.ptr)) return fail(rc);
    std::cout << text.ptr;
    return pass ? 0 : 1;
  }

  if (weights->parsed()) {
    cd_weights* model = nullptr;
    if (int rc = cd_compute_weights(scenario.ptr, &model)) return fail(rc);
    StringHandle text;
    int rc = cd_weights_text(model, &text.ptr);
    if (rc == CD_OK) std::cout << text.ptr;
    cd_weights_free(model);
    return rc == CD_OK ? 0 : fail(rc);
  }

  if (decompose->parsed()) {
    bool ok = false;
    const std::string table = read_file(input_path, ok);
    if (!ok) {
      std::cerr << "error: cannot read " << input_path << "\n";
      return 1;
    }
    StringHandle csv;
    if (int rc = cd_decompose_leader_csv(scenario.ptr, table.c_str(), &csv.ptr)) return fail(rc);
    if (output_path.empty())
      std::cout << csv.ptr;
    else if (!write_file(output_path, csv.ptr)) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return 1;
    }
    return 0;
  }

  if (plan_cmd->parsed()) {
    PlanHandle plan;
    if (int rc = cd_plan_build(scenario.ptr, &plan.ptr)) return fail(rc);
    StringHandle text;
    if (int rc = cd_plan_to_json(plan.ptr, &text.ptr)) return fail(rc);
    double duration = 0.0;
    cd_plan_total_duration(plan.ptr, &duration);
    if (output_path.empty()) {
      std::cout << text.ptr;
    } else if (!write_file(output_path, text.ptr)) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return 1;
    }
    std::cerr << "plan duration " << duration << " s\n";
    return 0;
  }

  if (simulate->parsed()) {
    PlanHandle plan;
    if (int rc = load_or_build_plan(scenario.ptr, plan_path, &plan.ptr)) return fail(rc);
    TrajectoryHandle traj;
    if (int rc = cd_simulate(scenario.ptr, plan.ptr, &traj.ptr)) return fail(rc);
    double sup = 0.0, sup_time = 0.0, min_sep = 0.0;
    int agent = -1;
    cd_trajectory_stats(traj.ptr, &sup, &sup_time, &agent, &min_sep);
    StringHandle csv;
    if (int rc = cd_trajectory_csv(traj.ptr, &csv.ptr)) return fail(rc);
    if (output_path.empty()) {
      std::cout << csv.ptr;
    } else if (!write_file(output_path, csv.ptr)) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return 1;
    }
    std::cerr << "sup deviation " << sup << " m (agent " << agent << " at t=" << sup_time
              << " s), min desired separation " << min_sep << " m\n";
    return 0;
  }

  if (certify->parsed()) {
    PlanHandle plan;
    if (int rc = load_or_build_plan(scenario.ptr, plan_path, &plan.ptr)) return fail(rc);
    ReportHandle report;
    if (int rc = cd_certify(scenario.ptr, plan.ptr, nullptr, &report.ptr)) return fail(rc);
    StringHandle text;
    if (int rc = cd_report_text(report.ptr, &text.ptr)) return fail(rc);
    std::cout << text.ptr;
    int pass = 0;
    cd_report_pass(report.ptr, &pass);
    return pass ? 0 : 2;
  }

  return 1;
}
