#include "contdef/contdef.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "engine.hpp"
#include "scenario.hpp"

using namespace contdef;

struct cd_scenario {
  Scenario value;
};
struct cd_weights {
  WeightModel value;
  std::string table_text;
};
struct cd_plan {
  Plan value;
};
struct cd_trajectory {
  TeamTrajectory value;
};
struct cd_report {
  SafetyReport value;
};

namespace {

thread_local std::string g_last_error;

int status_of(const Error& e) { return static_cast<int>(e.code()); }

template <typename F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CD_E_UNKNOWN;
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

int require_arg(bool ok) {
  if (!ok) {
    g_last_error = "null argument";
    return CD_E_INVALID_ARGUMENT;
  }
  return CD_OK;
}

}  // namespace

extern "C" {

const char* cd_version(void) { return "contdef 1.0.0"; }

const char* cd_status_name(int status) {
  if (status == CD_E_INVALID_ARGUMENT) return "InvalidArgument";
  if (status == CD_E_UNKNOWN) return "UnknownError";
  return errc_name(static_cast<Errc>(status));
}

const char* cd_last_error_message(void) { return g_last_error.c_str(); }

void cd_string_free(char* text) { delete[] text; }

int cd_scenario_load(const char* path, cd_scenario** out) {
  if (int rc = require_arg(path && out)) return rc;
  return guarded([&] { *out = new cd_scenario{load_scenario(path)}; });
}

int cd_scenario_parse(const char* json_text, cd_scenario** out) {
  if (int rc = require_arg(json_text && out)) return rc;
  return guarded([&] { *out = new cd_scenario{parse_scenario_text(json_text)}; });
}

int cd_scenario_builtin(const char* name, cd_scenario** out) {
  if (int rc = require_arg(name && out)) return rc;
  return guarded([&] {
    if (std::string(name) != "table2")
      raise(Errc::schema_error, "unknown builtin scenario '" + std::string(name) + "'");
    *out = new cd_scenario{parse_scenario_text(builtin_table2_scenario())};
  });
}

void cd_scenario_free(cd_scenario* scenario) { delete scenario; }

int cd_scenario_to_json(const cd_scenario* scenario, char** out_text) {
  if (int rc = require_arg(scenario && out_text)) return rc;
  return guarded([&] { *out_text = copy_string(serialize_scenario(scenario->value)); });
}

int cd_scenario_validate(const cd_scenario* scenario, int* pass, char** report_text) {
  if (int rc = require_arg(scenario != nullptr)) return rc;
  return guarded([&] {
    ValidationReport report = run_validation(scenario->value);
    if (pass) *pass = report.pass() ? 1 : 0;
    if (report_text) *report_text = copy_string(report.to_text());
  });
}

int cd_reference_metrics(const cd_scenario* scenario, double* min_separation,
                         double* boundary_clearance, double* max_deviation_bound,
                         double* theta_u0, double* psi_u0, int* pair_a, int* pair_b) {
  if (int rc = require_arg(scenario != nullptr)) return rc;
  return guarded([&] {
    SafetyParameters params = reference_metrics(scenario->value.cfg, scenario->value.vcs,
                                                scenario->value.safety.epsilon);
    if (min_separation) *min_separation = params.min_separation;
    if (boundary_clearance) *boundary_clearance = params.boundary_clearance;
    if (max_deviation_bound) *max_deviation_bound = params.max_deviation_bound;
    if (theta_u0) *theta_u0 = params.theta_u0;
    if (psi_u0) *psi_u0 = params.psi_u0;
    if (pair_a) *pair_a = params.closest_pair_a;
    if (pair_b) *pair_b = params.closest_pair_b;
  });
}

int cd_compute_weights(const cd_scenario* scenario, cd_weights** out) {
  if (int rc = require_arg(scenario && out)) return rc;
  return guarded([&] {
    WeightModel model = compute_weights(scenario->value.cfg, scenario->value.graph);
    std::string text = weights_text(scenario->value, model);
    *out = new cd_weights{std::move(model), std::move(text)};
  });
}

void cd_weights_free(cd_weights* weights) { delete weights; }

int cd_weights_text(const cd_weights* weights, char** out_text) {
  if (int rc = require_arg(weights && out_text)) return rc;
  return guarded([&] { *out_text = copy_string(weights->table_text); });
}

int cd_weights_follower_count(const cd_weights* weights, int* out_count) {
  if (int rc = require_arg(weights && out_count)) return rc;
  *out_count = static_cast<int>(weights->value.followers.size());
  return CD_OK;
}

int cd_weights_follower_id(const cd_weights* weights, int index, int* out_id) {
  if (int rc = require_arg(weights && out_id)) return rc;
  return guarded([&] {
    if (index < 0 || index >= static_cast<int>(weights->value.followers.size()))
      raise(Errc::schema_error, "follower index out of range");
    *out_id = weights->value.followers[static_cast<size_t>(index)];
  });
}

int cd_weights_leader_map_row(const cd_weights* weights, int follower_id, double* out_row,
                              int capacity) {
  if (int rc = require_arg(weights && out_row)) return rc;
  return guarded([&] {
    const int row = weights->value.follower_index(follower_id);
    const Eigen::Index cols = weights->value.leader_map.cols();
    if (capacity < cols) raise(Errc::schema_error, "row buffer too small");
    for (Eigen::Index j = 0; j < cols; ++j) out_row[j] = weights->value.leader_map(row, j);
  });
}

int cd_weights_real_weight(const cd_weights* weights, int follower_id, int neighbor_id,
                           double* out_weight) {
  if (int rc = require_arg(weights && out_weight)) return rc;
  return guarded([&] {
    auto it = weights->value.real_weights.find(follower_id);
    if (it == weights->value.real_weights.end())
      raise(Errc::schema_error, "not a follower id: " + std::to_string(follower_id));
    auto jt = it->second.find(neighbor_id);
    if (jt == it->second.end())
      raise(Errc::missing_neighbor, "agent " + std::to_string(neighbor_id) +
                                        " is not a real in-neighbor of " +
                                        std::to_string(follower_id));
    *out_weight = jt->second;
  });
}

int cd_weights_spectral_abscissa(const cd_weights* weights, double* out_value) {
  if (int rc = require_arg(weights && out_value)) return rc;
  return guarded([&] { *out_value = max_eigenvalue_real_part(weights->value.a); });
}

int cd_plan_build(const cd_scenario* scenario, cd_plan** out) {
  if (int rc = require_arg(scenario && out)) return rc;
  return guarded([&] { *out = new cd_plan{build_plan(scenario->value)}; });
}

void cd_plan_free(cd_plan* plan) { delete plan; }

int cd_plan_to_json(const cd_plan* plan, char** out_text) {
  if (int rc = require_arg(plan && out_text)) return rc;
  return guarded([&] { *out_text = copy_string(serialize_plan(plan->value)); });
}

int cd_plan_parse(const char* json_text, cd_plan** out) {
  if (int rc = require_arg(json_text && out)) return rc;
  return guarded([&] { *out = new cd_plan{parse_plan_text(json_text)}; });
}

int cd_plan_total_duration(const cd_plan* plan, double* out_duration) {
  if (int rc = require_arg(plan && out_duration)) return rc;
  *out_duration = plan->value.total_duration();
  return CD_OK;
}

int cd_plan_segment_count(const cd_plan* plan, int* out_count) {
  if (int rc = require_arg(plan && out_count)) return rc;
  *out_count = static_cast<int>(plan->value.durations.size());
  return CD_OK;
}

int cd_plan_features_csv(const cd_scenario* scenario, const cd_plan* plan, double dt,
                         char** out_csv) {
  if (int rc = require_arg(scenario && plan && out_csv)) return rc;
  return guarded([&] {
    PlanSamples samples = sample_plan(plan->value, scenario->value.cfg, dt);
    *out_csv = copy_string(features_csv(samples));
  });
}

int cd_simulate(const cd_scenario* scenario, const cd_plan* plan, cd_trajectory** out) {
  if (int rc = require_arg(scenario && plan && out)) return rc;
  return guarded(
      [&] { *out = new cd_trajectory{run_simulation(scenario->value, plan->value)}; });
}

void cd_trajectory_free(cd_trajectory* trajectory) { delete trajectory; }

int cd_trajectory_csv(const cd_trajectory* trajectory, char** out_csv) {
  if (int rc = require_arg(trajectory && out_csv)) return rc;
  return guarded([&] { *out_csv = copy_string(trajectory_csv(trajectory->value)); });
}

int cd_trajectory_stats(const cd_trajectory* trajectory, double* sup_deviation,
                        double* sup_deviation_time, int* sup_deviation_agent,
                        double* min_desired_separation) {
  if (int rc = require_arg(trajectory != nullptr)) return rc;
  const TeamTrajectory& traj = trajectory->value;
  if (sup_deviation) *sup_deviation = traj.sup_deviation;
  if (sup_deviation_time) *sup_deviation_time = traj.sup_deviation_time;
  if (sup_deviation_agent) *sup_deviation_agent = traj.sup_deviation_agent;
  if (min_desired_separation)
    *min_desired_separation =
        *std::min_element(traj.min_desired_separation.begin(), traj.min_desired_separation.end());
  return CD_OK;
}

int cd_certify(const cd_scenario* scenario, const cd_plan* plan,
               const cd_trajectory* trajectory, cd_report** out) {
  if (int rc = require_arg(scenario && plan && out)) return rc;
  return guarded([&] {
    *out = new cd_report{run_certification(scenario->value, plan->value,
                                           trajectory ? &trajectory->value : nullptr)};
  });
}

void cd_report_free(cd_report* report) { delete report; }

int cd_report_text(const cd_report* report, char** out_text) {
  if (int rc = require_arg(report && out_text)) return rc;
  return guarded([&] { *out_text = copy_string(report->value.to_text()); });
}

int cd_report_pass(const cd_report* report, int* out_pass) {
  if (int rc = require_arg(report && out_pass)) return rc;
  *out_pass = report->value.all_pass() ? 1 : 0;
  return CD_OK;
}

int cd_decompose_leader_csv(const cd_scenario* scenario, const char* leader_csv,
                            char** out_features_csv) {
  if (int rc = require_arg(scenario && leader_csv && out_features_csv)) return rc;
  return guarded([&] {
    PlanSamples samples = decompose_leader_table(scenario->value.cfg, leader_csv);
    *out_features_csv = copy_string(features_csv(samples));
  });
}

int cd_reproduce_table2(char** out_text, int* pass) {
  return guarded([&] {
    Table2Outcome outcome = reproduce_table2();
    if (out_text) *out_text = copy_string(outcome.text);
    if (pass) *pass = outcome.pass ? 1 : 0;
  });
}

}  // extern "C"
