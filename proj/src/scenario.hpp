#pragma once

#include <optional>
#include <string>

#include "comms.hpp"
#include "dynamics.hpp"
#include "planner.hpp"
#include "safety.hpp"

namespace contdef {

struct SafetyConfig {
  double epsilon = 0.5;
  std::string mode = "conservative";  // or "relaxed"
  std::optional<double> delta;          // explicit deviation bound, m
  std::optional<double> stretch_floor;  // alternatively derive delta from this
};

struct PlanRequest {
  PlanMode mode = PlanMode::obstacle_free;
  // Obstacle-free: endpoint features; segment duration optional (otherwise
  // the minimum feasible travel time is searched).
  std::optional<DeformationFeatures> end_features;
  std::optional<double> duration;
  // Obstacle-laden: goal simplex placement on the grid.
  std::vector<Vec3> goal_vcs;
};

struct TimingConfig {
  double dt = 0.005;
  double min_segment_time = 1.0;
  double max_segment_time = 512.0;
  int output_stride = 1;
};

/// Everything a run needs, parsed from one JSON document.
struct Scenario {
  std::string name;
  long seed = 0;
  ReferenceConfiguration cfg;
  CommGraph graph;
  std::optional<VcsSimplex> vcs;
  ObstacleMap map;
  SafetyConfig safety;
  GainSet gains;
  InputBounds bounds;
  std::optional<PlanRequest> plan_request;
  TimingConfig timing;
};

/// Parses and structurally validates a scenario document; schema problems
/// raise SchemaError naming the offending field, malformed JSON raises
/// ParseError.
Scenario parse_scenario_text(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

std::string serialize_plan(const Plan& plan);
Plan parse_plan_text(const std::string& json_text);
Plan load_plan(const std::string& path);

/// Trajectory CSV: time, agent, position, desired position, deviation and the
/// three input channels per row.
std::string trajectory_csv(const TeamTrajectory& trajectory);

/// Features-over-time CSV from sampled plan decompositions.
std::string features_csv(const PlanSamples& samples);

/// Decomposes a leader trajectory table (columns: time, then x,y,z per leader
/// in leader order) into features over time.
PlanSamples decompose_leader_table(const ReferenceConfiguration& cfg, const std::string& csv_text);

/// The bundled sixteen-quadcopter collective-takeoff scenario.
const std::string& builtin_table2_scenario();

}  // namespace contdef
