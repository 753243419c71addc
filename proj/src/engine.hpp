#pragma once

#include <string>

#include "scenario.hpp"

namespace contdef {

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool pass() const;
  std::string to_text() const;
};

/// Structural assumption checks: orthogonal initial transform, leader simplex
/// rank, communication structure and reachability, follower containment, and
/// simplex validity along the requested plan.
ValidationReport run_validation(const Scenario& scenario);

/// Reference metrics plus the resolved deviation bound (explicit delta or
/// derived from the configured stretch floor).
SafetyParameters derive_safety(const Scenario& scenario);

/// Human-readable tables of the follower-to-leader map and real weights.
std::string weights_text(const Scenario& scenario, const WeightModel& model);

/// Builds the requested plan: a single rest-to-rest feature segment, or a
/// grid search over containment-simplex placements followed by collinear-run
/// merging. Missing durations are filled by the minimum-travel-time search.
Plan build_plan(const Scenario& scenario);

TeamTrajectory run_simulation(const Scenario& scenario, const Plan& plan);

/// Full safety certificate over a simulated run: bounded deviation,
/// inter-agent condition (per the configured mode), containment when a
/// containment simplex is configured, input feasibility, and the brute-force
/// desired-separation audit. Simulates internally when no trajectory is given.
SafetyReport run_certification(const Scenario& scenario, const Plan& plan,
                               const TeamTrajectory* trajectory);

struct Table2Outcome {
  bool pass = false;
  double min_separation = 0.0;
  double theta_u0 = 0.0, psi_u0 = 0.0;
  double delta = 0.0;
  double sup_deviation = 0.0;
  double min_desired_separation = 0.0;
  std::string text;
};

/// Runs the bundled sixteen-quadcopter takeoff end to end and compares the
/// published constants: tabulated weights, minimum separation and its pair,
/// reference stretch angles, the derived deviation bound, the closed-loop
/// deviation gate and the desired-separation floor.
Table2Outcome reproduce_table2();

}  // namespace contdef
