#include "comms.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <deque>
#include <set>

namespace contdef {

const std::vector<int>& CommGraph::neighbors_of(int id) const {
  auto it = in_neighbors.find(id);
  if (it == in_neighbors.end())
    raise(Errc::schema_error, "agent " + std::to_string(id) + " has no in-neighbor list");
  return it->second;
}

namespace {

bool neighbor_set_is_leaders(const ReferenceConfiguration& cfg, const std::vector<int>& neigh) {
  std::set<int> a(neigh.begin(), neigh.end());
  std::set<int> b(cfg.leaders.begin(), cfg.leaders.end());
  return a == b;
}

std::vector<Vec3> neighbor_positions(const ReferenceConfiguration& cfg,
                                     const std::vector<int>& neigh) {
  std::vector<Vec3> out;
  out.reserve(neigh.size());
  for (int id : neigh) out.push_back(cfg.position_of(id));
  return out;
}

}  // namespace

void validate_graph(const ReferenceConfiguration& cfg, const CommGraph& graph) {
  const size_t expected = static_cast<size_t>(cfg.n) + 1;

  for (int id : cfg.leaders)
    if (graph.in_neighbors.count(id))
      raise(Errc::schema_error, "leader " + std::to_string(id) + " must not have in-neighbors");

  auto check_structure = [&](int id, bool is_aux) {
    const std::vector<int>& neigh = graph.neighbors_of(id);
    if (neigh.size() != expected)
      raise(Errc::schema_error,
            "agent " + std::to_string(id) + " needs exactly n+1 in-neighbors");
    std::set<int> unique(neigh.begin(), neigh.end());
    if (unique.size() != neigh.size())
      raise(Errc::schema_error, "agent " + std::to_string(id) + " repeats an in-neighbor");
    for (int j : neigh) {
      if (j == id) raise(Errc::schema_error, "agent cannot neighbor itself");
      if (!cfg.positions.count(j) && !cfg.aux_positions.count(j))
        raise(Errc::schema_error, "unknown in-neighbor id " + std::to_string(j));
    }
    if (is_aux && !neighbor_set_is_leaders(cfg, neigh))
      raise(Errc::schema_error,
            "auxiliary node " + std::to_string(id) + " must communicate with all leaders");
  };
  for (int id : cfg.followers) check_structure(id, false);
  for (const auto& [id, pos] : cfg.aux_positions) {
    (void)pos;
    check_structure(id, true);
  }

  // Directed reachability from the leader set to every non-leader, checked
  // up front as a pure graph property.
  std::set<int> reached(cfg.leaders.begin(), cfg.leaders.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [id, neigh] : graph.in_neighbors) {
      if (reached.count(id)) continue;
      if (std::any_of(neigh.begin(), neigh.end(), [&](int j) { return reached.count(j) > 0; })) {
        reached.insert(id);
        grew = true;
      }
    }
  }
  for (const auto& [id, neigh] : graph.in_neighbors) {
    (void)neigh;
    if (!reached.count(id))
      raise(Errc::unreachable, "no directed path from the leaders to agent " + std::to_string(id));
  }

  auto check_geometry = [&](int id, bool is_aux) {
    const std::vector<int>& neigh = graph.neighbors_of(id);
    std::vector<Vec3> pts = neighbor_positions(cfg, neigh);
    if (simplex_rank(pts) != cfg.n)
      raise(Errc::degenerate_simplex,
            "in-neighbors of agent " + std::to_string(id) + " do not span an n-D simplex");

    // Boundary followers communicating with the full leader set play the same
    // role as auxiliary nodes and may sit outside the simplex.
    if (!is_aux && !neighbor_set_is_leaders(cfg, neigh)) {
      Eigen::VectorXd theta = barycentric(pts, cfg.position_of(id), cfg.n);
      if (theta.minCoeff() <= 1e-12)
        raise(Errc::containment_violated,
              "follower " + std::to_string(id) + " is not strictly inside its in-neighbor simplex");
    }
  };
  for (int id : cfg.followers) check_geometry(id, false);
  for (const auto& [id, pos] : cfg.aux_positions) {
    (void)pos;
    check_geometry(id, true);
  }
}

int WeightModel::follower_index(int id) const {
  auto it = std::lower_bound(followers.begin(), followers.end(), id);
  if (it == followers.end() || *it != id)
    raise(Errc::schema_error, "id " + std::to_string(id) + " is not a follower");
  return static_cast<int>(it - followers.begin());
}

WeightModel compute_weights(const ReferenceConfiguration& cfg, const CommGraph& graph) {
  validate_graph(cfg, graph);

  WeightModel model;
  model.n = cfg.n;
  model.leaders = cfg.leaders;
  model.followers = cfg.followers;
  std::sort(model.followers.begin(), model.followers.end());
  for (const auto& [id, pos] : cfg.aux_positions) {
    (void)pos;
    model.aux.push_back(id);
  }

  const int nl = static_cast<int>(model.leaders.size());
  const int nf = static_cast<int>(model.followers.size());
  const int na = static_cast<int>(model.aux.size());
  const int total = nl + nf + na;

  std::map<int, int> index;  // id -> row/column in [leaders, followers, aux] order
  int next = 0;
  for (int id : model.leaders) index[id] = next++;
  for (int id : model.followers) index[id] = next++;
  for (int id : model.aux) index[id] = next++;

  model.w = Eigen::MatrixXd::Zero(total, total);
  for (int i = 0; i < total; ++i) model.w(i, i) = -1.0;
  for (const auto& [id, neigh] : graph.in_neighbors) {
    Eigen::VectorXd weights = barycentric(neighbor_positions(cfg, neigh), cfg.position_of(id), cfg.n);
    for (size_t k = 0; k < neigh.size(); ++k) model.w(index.at(id), index.at(neigh[k])) = weights(k);
  }

  model.a = model.w.block(nl, nl, nf, nf);
  Eigen::MatrixXd w_fl = model.w.block(nl, 0, nf, nl);
  Eigen::MatrixXd w_fa = model.w.block(nl, nl + nf, nf, na);
  Eigen::MatrixXd w_al = model.w.block(nl + nf, 0, na, nl);
  model.b = w_fl + w_fa * w_al;

  // Sign resolution: the weight matrix has -1 on the diagonal, so stacked
  // reference coordinates satisfy B z_l + A z_f = 0 on follower rows (leader
  // rows carry -z_l) and the follower-to-leader map solves A * leader_map = -B.
  // Solved by factorization rather than an explicit inverse.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(model.a);
  if (!lu.isInvertible())
    raise(Errc::singular_weight_system, "follower weight block is singular");
  model.leader_map = lu.solve(-model.b);

  model.coupling = Eigen::MatrixXd::Zero(nl + nf, nl + nf);
  model.coupling.topLeftCorner(nl, nl) = -Eigen::MatrixXd::Identity(nl, nl);
  model.coupling.block(nl, 0, nf, nl) = model.b;
  model.coupling.block(nl, nl, nf, nf) = model.a;

  // Substitute each auxiliary in-neighbor by its leader expansion; direct
  // real in-neighbors keep their barycentric weight.
  for (int id : model.followers) {
    const std::vector<int>& neigh = graph.neighbors_of(id);
    Eigen::VectorXd weights = barycentric(neighbor_positions(cfg, neigh), cfg.position_of(id), cfg.n);
    std::map<int, double>& real = model.real_weights[id];
    for (size_t k = 0; k < neigh.size(); ++k) {
      const int j = neigh[k];
      if (cfg.aux_positions.count(j)) {
        Eigen::VectorXd alpha = leader_expansion(cfg, j);
        for (int l = 0; l < nl; ++l) real[model.leaders[l]] += weights(k) * alpha(l);
      } else {
        real[j] += weights(k);
      }
    }
    for (auto it = real.begin(); it != real.end();)
      it = (std::abs(it->second) < 1e-15) ? real.erase(it) : std::next(it);
  }
  return model;
}

double max_eigenvalue_real_part(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m, false);
  return eig.eigenvalues().real().maxCoeff();
}

Eigen::VectorXd follower_desired_from_leaders(const WeightModel& model,
                                              const Eigen::VectorXd& leader_values) {
  if (leader_values.size() != static_cast<Eigen::Index>(model.leaders.size()))
    raise(Errc::schema_error, "expected one value per leader");
  return model.leader_map * leader_values;
}

Vec3 local_desired(const WeightModel& model, int follower,
                   const std::map<int, Vec3>& neighbor_positions) {
  auto it = model.real_weights.find(follower);
  if (it == model.real_weights.end())
    raise(Errc::schema_error, "id " + std::to_string(follower) + " is not a follower");
  Vec3 out = Vec3::Zero();
  for (const auto& [j, weight] : it->second) {
    auto pos = neighbor_positions.find(j);
    if (pos == neighbor_positions.end())
      raise(Errc::missing_neighbor,
            "position of in-neighbor " + std::to_string(j) + " not provided");
    out += weight * pos->second;
  }
  return out;
}

}  // namespace contdef
