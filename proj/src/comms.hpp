#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "formation.hpp"

namespace contdef {

/// Directed communication topology: each follower and each auxiliary node
/// lists its n+1 in-neighbors (ordered); leaders have none.
struct CommGraph {
  std::map<int, std::vector<int>> in_neighbors;

  const std::vector<int>& neighbors_of(int id) const;
};

/// Checks the structural communication assumptions:
///  - every non-leader has exactly n+1 in-neighbors spanning an n-simplex,
///  - every auxiliary node's in-neighbor set is exactly the leader set,
///  - a directed path exists from the leader set to every non-leader,
///  - each follower is strictly inside its in-neighbor simplex, except
///    boundary followers whose in-neighbor set is the leader set (those may
///    sit anywhere, like auxiliary nodes).
void validate_graph(const ReferenceConfiguration& cfg, const CommGraph& graph);

struct WeightModel {
  int n = 3;
  std::vector<int> leaders;    // order from the configuration
  std::vector<int> followers;  // ascending
  std::vector<int> aux;        // ascending

  Eigen::MatrixXd w;           // (N+Na)^2 weight matrix, -1 diagonal
  Eigen::MatrixXd a;           // follower-to-follower block
  Eigen::MatrixXd b;           // W_fl + W_fa * W_al
  Eigen::MatrixXd leader_map;  // per-axis map follower values = leader_map * leader values
  Eigen::MatrixXd coupling;    // [[-I, 0], [B, A]] over real agents, real-weight reduced

  /// Real communication weights after eliminating auxiliary in-neighbors
  /// onto the leaders.
  std::map<int, std::map<int, double>> real_weights;

  int follower_index(int id) const;
};

/// Builds the weight matrix from barycentric in-neighbor weights, partitions
/// it, reduces the auxiliary nodes and solves for the follower-to-leader map.
WeightModel compute_weights(const ReferenceConfiguration& cfg, const CommGraph& graph);

/// Largest real part over the eigenvalues of the follower block; negative
/// means the block is Hurwitz.
double max_eigenvalue_real_part(const Eigen::MatrixXd& m);

/// Follower values of one coordinate axis given the n+1 leader values.
Eigen::VectorXd follower_desired_from_leaders(const WeightModel& model,
                                              const Eigen::VectorXd& leader_values);

/// Convex combination of real in-neighbor positions with weights from the
/// reduced graph; the follower's control reference.
Vec3 local_desired(const WeightModel& model, int follower,
                   const std::map<int, Vec3>& neighbor_positions);

}  // namespace contdef
