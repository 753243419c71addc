#pragma once

// Random valid team generator shared by the comms property tests and the
// acceptance sweep: followers are placed as strictly positive combinations of
// previously placed agents so containment holds by construction; every
// seventh follower becomes a boundary follower communicating with the full
// leader set from an arbitrary position, and auxiliary nodes sit on a wide
// box around the team.

#include <random>

#include "comms.hpp"

namespace fixtures {

struct RandomTeam {
  contdef::ReferenceConfiguration cfg;
  contdef::CommGraph graph;
};

inline RandomTeam make_random_team(std::mt19937& rng, int n, int followers, int aux) {
  using contdef::Vec3;
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> spread(-40.0, 40.0);
  RandomTeam team;
  team.cfg.n = n;

  std::vector<Vec3> base;
  if (n == 1)
    base = {Vec3(-20, 0, 0), Vec3(20, 0, 0)};
  else if (n == 2)
    base = {Vec3(-20, -15, 0), Vec3(25, -10, 0), Vec3(0, 30, 0)};
  else
    base = {Vec3(-30, -40, 0), Vec3(-30, 40, 0), Vec3(50, 0, 0), Vec3(0, 0, 60)};

  int next_id = 1;
  for (const Vec3& p : base) {
    team.cfg.leaders.push_back(next_id);
    team.cfg.positions[next_id] = p;
    ++next_id;
  }

  std::vector<int> placed = team.cfg.leaders;
  for (int f = 0; f < followers; ++f) {
    const int id = next_id++;
    const bool boundary = (f % 7 == 6);
    std::vector<int> neighbors;
    Vec3 pos = Vec3::Zero();
    if (boundary) {
      neighbors = team.cfg.leaders;
      pos = Vec3(spread(rng), n >= 2 ? spread(rng) : 0.0, n >= 3 ? spread(rng) : 0.0);
    } else {
      for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<int> candidates = placed;
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(static_cast<size_t>(n) + 1);
        std::vector<Vec3> pts;
        for (int j : candidates) pts.push_back(team.cfg.positions.at(j));
        if (contdef::simplex_rank(pts) != n) continue;
        Eigen::VectorXd w(n + 1);
        for (int k = 0; k <= n; ++k) w(k) = unit(rng);
        w /= w.sum();
        pos = Vec3::Zero();
        for (int k = 0; k <= n; ++k) pos += w(k) * pts[static_cast<size_t>(k)];
        neighbors = candidates;
        break;
      }
      if (neighbors.empty()) continue;  // extremely unlikely; skip the slot
    }
    team.cfg.positions[id] = pos;
    team.cfg.followers.push_back(id);
    team.graph.in_neighbors[id] = neighbors;
    placed.push_back(id);
  }

  for (int a = 0; a < aux; ++a) {
    const int id = next_id++;
    team.cfg.aux_positions[id] =
        Vec3(spread(rng) * 2.0, n >= 2 ? spread(rng) * 2.0 : 0.0, n >= 3 ? spread(rng) * 2.0 : 0.0);
    team.graph.in_neighbors[id] = team.cfg.leaders;
  }
  team.cfg.validate();
  return team;
}

}  // namespace fixtures
