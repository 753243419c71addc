#pragma once

#include <map>
#include <vector>

#include "geometry.hpp"
#include "types.hpp"

namespace contdef {

/// Reference/initial configuration of the team: real agents split into an
/// ordered leader list and followers, plus virtual auxiliary nodes on the
/// boundary of a domain enclosing the team.
struct ReferenceConfiguration {
  int n = 3;  // deformation dimension
  std::vector<int> leaders;
  std::vector<int> followers;  // ascending
  std::map<int, Vec3> positions;      // real agents
  std::map<int, Vec3> aux_positions;  // auxiliary nodes
  Mat3 init_rotation = Mat3::Identity();
  Vec3 init_offset = Vec3::Zero();

  int num_real() const { return static_cast<int>(positions.size()); }
  int num_aux() const { return static_cast<int>(aux_positions.size()); }

  const Vec3& position_of(int id) const;
  bool is_leader(int id) const;
  std::vector<Vec3> leader_positions() const;

  /// Enforces the structural invariants: leaders span an n-simplex, the
  /// initial transform is orthogonal, reference positions respect the
  /// dimension (first-axis line for n=1, z=0 plane for n=2), ids are unique
  /// and auxiliary ids follow the real ids contiguously.
  void validate() const;
};

struct TeamSnapshot {
  double time = 0.0;
  std::map<int, Vec3> positions;
};

/// Applies r -> Q r + d to every real agent.
TeamSnapshot apply_transform(const ReferenceConfiguration& cfg, const Mat3& q, const Vec3& d);

/// Barycentric weights of an agent's reference position with respect to the
/// leaders' reference simplex. Defined for followers and auxiliary nodes;
/// entries may be negative for agents outside the leading simplex.
Eigen::VectorXd leader_expansion(const ReferenceConfiguration& cfg, int agent);

}  // namespace contdef
