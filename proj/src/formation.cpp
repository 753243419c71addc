#include "formation.hpp"

#include <algorithm>
#include <set>

namespace contdef {

const Vec3& ReferenceConfiguration::position_of(int id) const {
  if (auto it = positions.find(id); it != positions.end()) return it->second;
  if (auto it = aux_positions.find(id); it != aux_positions.end()) return it->second;
  raise(Errc::schema_error, "unknown agent id " + std::to_string(id));
}

bool ReferenceConfiguration::is_leader(int id) const {
  return std::find(leaders.begin(), leaders.end(), id) != leaders.end();
}

std::vector<Vec3> ReferenceConfiguration::leader_positions() const {
  std::vector<Vec3> out;
  out.reserve(leaders.size());
  for (int id : leaders) out.push_back(position_of(id));
  return out;
}

void ReferenceConfiguration::validate() const {
  if (n < 1 || n > 3) raise(Errc::schema_error, "dimension must be 1, 2 or 3");
  if (static_cast<int>(leaders.size()) != n + 1)
    raise(Errc::schema_error, "expected " + std::to_string(n + 1) + " leaders");

  std::set<int> ids;
  for (const auto& [id, pos] : positions) {
    if (!pos.allFinite()) raise(Errc::schema_error, "non-finite position for agent " + std::to_string(id));
    if (!ids.insert(id).second) raise(Errc::schema_error, "duplicate agent id");
  }
  for (const auto& [id, pos] : aux_positions) {
    if (!pos.allFinite()) raise(Errc::schema_error, "non-finite position for aux node " + std::to_string(id));
    if (!ids.insert(id).second)
      raise(Errc::schema_error, "auxiliary id collides with a real agent id");
  }
  for (int id : leaders)
    if (!positions.count(id)) raise(Errc::schema_error, "leader id not among agents");
  for (int id : followers)
    if (!positions.count(id) || is_leader(id))
      raise(Errc::schema_error, "follower list inconsistent with agents");
  if (static_cast<int>(leaders.size() + followers.size()) != num_real())
    raise(Errc::schema_error, "every real agent must be a leader or a follower");

  // Auxiliary ids follow the real ids contiguously, matching the weight
  // matrix partition layout.
  if (!aux_positions.empty()) {
    int max_real = positions.rbegin()->first;
    int expected = max_real + 1;
    for (const auto& [id, pos] : aux_positions) {
      (void)pos;
      if (id != expected)
        raise(Errc::schema_error, "auxiliary ids must be contiguous after real ids");
      ++expected;
    }
  }

  if (simplex_rank(leader_positions()) != n)
    raise(Errc::degenerate_simplex, "leaders do not span an n-D simplex");

  if ((init_rotation.transpose() * init_rotation - Mat3::Identity()).norm() > 1e-9)
    raise(Errc::schema_error, "initial transform must be orthogonal");

  auto check_plane = [&](const Vec3& p, int id) {
    if (n == 1 && (std::abs(p.y()) > kHyperplaneTolerance || std::abs(p.z()) > kHyperplaneTolerance))
      raise(Errc::schema_error,
            "agent " + std::to_string(id) + " off the first axis in a 1-D configuration");
    if (n == 2 && std::abs(p.z()) > kHyperplaneTolerance)
      raise(Errc::schema_error,
            "agent " + std::to_string(id) + " off the z=0 plane in a 2-D configuration");
  };
  for (const auto& [id, pos] : positions) check_plane(pos, id);
  for (const auto& [id, pos] : aux_positions) check_plane(pos, id);
}

TeamSnapshot apply_transform(const ReferenceConfiguration& cfg, const Mat3& q, const Vec3& d) {
  const double scale = q.norm();
  if (scale == 0.0 || std::abs(q.determinant()) < 1e-12 * scale * scale * scale)
    raise(Errc::singular_transform, "transform is singular");
  TeamSnapshot snap;
  for (const auto& [id, pos] : cfg.positions) snap.positions[id] = q * pos + d;
  return snap;
}

Eigen::VectorXd leader_expansion(const ReferenceConfiguration& cfg, int agent) {
  if (cfg.is_leader(agent)) raise(Errc::schema_error, "leaders have no leader expansion");
  return barycentric(cfg.leader_positions(), cfg.position_of(agent), cfg.n);
}

}  // namespace contdef
