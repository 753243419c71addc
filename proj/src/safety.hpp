#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "formation.hpp"

namespace contdef {

/// Virtual containment simplex: n+1 vertices enclosing the team, moving under
/// the same homogeneous transform as the leaders.
struct VcsSimplex {
  std::vector<Vec3> reference_vertices;  // n+1
};

struct SafetyParameters {
  double epsilon = 0.5;          // vehicle bounding-ball radius, m
  double delta = 0.0;            // admissible tracking deviation, m
  double min_separation = 0.0;   // smallest pairwise reference distance
  double boundary_clearance = std::numeric_limits<double>::infinity();
  double max_deviation_bound = 0.0;  // largest admissible delta
  int closest_pair_a = -1, closest_pair_b = -1;
  Vec3 min_separation_direction = Vec3::UnitX();  // unit vector of the closest pair
  double theta_u0 = 0.0, psi_u0 = 0.0;            // stretch angles of that direction

  /// Floor on the stretch along the pinned direction: 2(delta+eps)/d_s.
  double relaxed_stretch_floor() const;
  /// Floor on every in-scope stretch: (delta+eps)/(delta_max+eps).
  double conservative_stretch_floor() const;
  /// Deviation bound implied by a conservative stretch floor.
  double deviation_for_stretch_floor(double stretch_floor) const;
};

/// Per-condition verdict with the worst margin and where it happened.
struct ConditionReport {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive means pass with room
  double worst_time = 0.0;
  int worst_agent_a = -1, worst_agent_b = -1;
  std::string detail;
};

struct SafetyReport {
  std::string mode;  // "conservative" or "relaxed"
  std::vector<ConditionReport> conditions;
  bool all_pass() const;
  std::string to_text() const;
};

/// Geometry-derived safety constants: minimum pairwise separation over the
/// real agents, clearance to the containment-simplex boundary, the largest
/// admissible deviation bound, and the pinned stretch direction with its
/// angles. epsilon must leave positive clearance between bounding balls.
SafetyParameters reference_metrics(const ReferenceConfiguration& cfg,
                                   const std::optional<VcsSimplex>& vcs, double epsilon);

/// All in-scope stretches stay above the conservative floor at every sample.
ConditionReport check_conservative(const std::vector<DeformationFeatures>& features,
                                   const std::vector<double>& times,
                                   const SafetyParameters& params);

/// Stretch along the pinned reference direction stays above the relaxed
/// floor; requires the stretch directions to remain exactly the reference
/// ones (constant deformation angles), otherwise AnglesNotConstant.
ConditionReport check_relaxed(const std::vector<HomogeneousTransform>& transforms,
                              const std::vector<double>& times, const SafetyParameters& params);

/// Every listed position strictly inside the transformed containment simplex
/// at every sample.
ConditionReport check_containment(const std::vector<double>& times,
                                  const std::vector<std::vector<Vec3>>& agent_positions,
                                  const std::vector<HomogeneousTransform>& transforms,
                                  const VcsSimplex& vcs, int n);

/// Safety Condition 1 (deviation within delta) and Condition 4 (inputs within
/// bounds) evaluated over a simulated trajectory.
std::vector<ConditionReport> check_deviation_and_inputs(const TeamTrajectory& trajectory,
                                                        const SafetyParameters& params,
                                                        const InputBounds& bounds);

/// Brute-force sufficient-condition oracle: smallest pairwise distance over
/// desired positions, checked against 2(delta+eps).
ConditionReport check_pairwise_desired(const ReferenceConfiguration& cfg,
                                       const std::vector<double>& times,
                                       const std::vector<HomogeneousTransform>& transforms,
                                       const SafetyParameters& params);

}  // namespace contdef
