#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dynamics.hpp"
#include "formation.hpp"
#include "jet.hpp"
#include "safety.hpp"

namespace contdef {

enum class PlanMode { obstacle_free, obstacle_laden };

/// Rest-to-rest quintic blend coefficients in normalized time.
std::array<double, 6> quintic_coefficients();

/// Blend value and time derivatives (orders 0..4) at t_rel within a segment
/// of the given duration; rest-to-rest boundary conditions hold at both ends.
Jet4 quintic_blend(double t_rel, double duration);

/// Generalized-coordinate layout for feature-space plans:
/// n=1: [l1, theta_r, psi_r, d]; n=2: [l1, l2, phi_r, theta_r, psi_r, d];
/// n=3: [l1, l2, l3, phi_r, theta_r, psi_r, d].
int feature_coordinate_count(int n);
Eigen::VectorXd pack_features(const DeformationFeatures& f);
DeformationFeatures unpack_features(const Eigen::VectorXd& values, int n, double theta_u,
                                    double psi_u);

struct ObstacleBox {
  Vec3 lo, hi;
};

struct ObstacleMap {
  std::vector<ObstacleBox> boxes;
  Vec3 workspace_lo = Vec3(-1e9, -1e9, -1e9);
  Vec3 workspace_hi = Vec3(1e9, 1e9, 1e9);
  double resolution = 1.0;
};

/// Piecewise-quintic plan over generalized coordinates. Feature-space plans
/// carry the pinned stretch angles; vertex-space plans carry the reference
/// containment-simplex vertices the coordinates refer to.
struct Plan {
  PlanMode mode = PlanMode::obstacle_free;
  int n = 3;
  std::vector<Eigen::VectorXd> waypoints;  // segments + 1 entries
  std::vector<double> durations;           // one per segment
  double stretch_theta_u = 0.0, stretch_psi_u = 0.0;  // phi_u pinned to zero
  std::vector<Vec3> vcs_reference;

  double total_duration() const;
  /// Generalized coordinate and derivatives at absolute plan time.
  std::vector<Jet4> coordinate_jets(double t) const;
  Eigen::VectorXd coordinate(double t) const;
  void validate(const ReferenceConfiguration& cfg) const;
};

/// Leader desired position and derivatives from a feature-space coordinate.
std::vector<std::array<Vec3, 5>> leaders_from_features(const ReferenceConfiguration& cfg,
                                                       const std::vector<Jet4>& coords,
                                                       double theta_u, double psi_u);

/// Leader desired positions from a vertex-space coordinate: each leader keeps
/// its barycentric weights with respect to the reference simplex vertices.
std::vector<std::array<Vec3, 5>> leaders_from_vertices(const ReferenceConfiguration& cfg,
                                                       const std::vector<Vec3>& vcs_reference,
                                                       const std::vector<Jet4>& coords);

/// Adapter feeding the closed-loop simulator.
LeaderMotion plan_leader_motion(const Plan& plan, const ReferenceConfiguration& cfg);

struct PlanSamples {
  std::vector<double> times;
  std::vector<HomogeneousTransform> transforms;
  std::vector<DeformationFeatures> features;
};

/// Desired transform and features along the plan, from decomposition of the
/// leader map at every step.
PlanSamples sample_plan(const Plan& plan, const ReferenceConfiguration& cfg, double dt);

using VcsPlacement = std::vector<Vec3>;  // n+1 vertices

struct SearchParams {
  double inflation = 0.0;      // vehicle radius + deviation bound
  double stretch_floor = 0.0;  // lower bound on the in-scope stretches
  long max_expansions = 20'000'000;
};

struct SearchResult {
  std::vector<VcsPlacement> waypoints;  // start through goal
  double cost = 0.0;
  long expanded = 0;
  double worst_heuristic_slack = 0.0;  // max of h - remaining cost on the path
};

/// Translation-invariant half of placement validity: the placement spans an
/// n-simplex and the stretches induced against the reference stay above the
/// floor.
bool placement_shape_valid(const VcsPlacement& placement, const VcsPlacement& reference, int n,
                           const SearchParams& params);

/// Position-dependent half: inside the workspace and clear of every obstacle
/// grown by the inflation radius.
bool placement_clear(const ObstacleMap& map, const VcsPlacement& placement,
                     const SearchParams& params);

/// True when the placement spans an n-simplex, clears every inflated
/// obstacle, stays in the workspace and keeps the induced stretches above
/// the floor.
bool placement_valid(const ObstacleMap& map, const VcsPlacement& placement,
                     const VcsPlacement& reference, int n, const SearchParams& params);

/// Grid search over containment-simplex placements. Successors either shift
/// the whole simplex one grid step along an axis or move a single vertex one
/// grid step; the step cost is the summed vertex travel and the heuristic is
/// the root-sum-square vertex distance to the goal.
SearchResult astar_plan(const ObstacleMap& map, const VcsPlacement& start,
                        const VcsPlacement& goal, const VcsPlacement& reference, int n,
                        const SearchParams& params);

/// Collapses runs of collinear waypoints and wraps the rest into a plan with
/// the given per-segment durations (scaled per segment length if one value).
Plan plan_from_placements(const std::vector<VcsPlacement>& placements, int n,
                          const VcsPlacement& reference, const std::vector<double>& durations);

struct TravelTimeParams {
  double t_min = 1.0;
  double t_cap = 512.0;
  double dt = 0.01;
  double delta = 0.1;
  InputBounds bounds;
  double tolerance = 0.01;  // relative bisection width
};

/// Feasibility of one rest-to-rest segment at a candidate duration: the
/// closed-loop rollout must keep every deviation within delta and every
/// input channel inside its bounds.
bool segment_feasible(const ReferenceConfiguration& cfg, const WeightModel& model,
                      const GainSet& gains, const Plan& segment, const TravelTimeParams& params);

/// Smallest feasible duration for the segment between two generalized
/// coordinates, found by doubling to the first feasible duration and
/// bisecting to the requested tolerance; feasibility is monotone in the
/// duration.
double min_travel_time(const ReferenceConfiguration& cfg, const WeightModel& model,
                       const GainSet& gains, const Plan& segment_template,
                       const TravelTimeParams& params);

}  // namespace contdef
