#include "planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "geometry.hpp"

namespace contdef {

std::array<double, 6> quintic_coefficients() { return {0.0, 0.0, 0.0, 10.0, -15.0, 6.0}; }

Jet4 quintic_blend(double t_rel, double duration) {
  if (duration <= 0.0) raise(Errc::schema_error, "segment duration must be positive");
  const Jet4 s = Jet4::variable(t_rel) * (1.0 / duration);
  const auto zeta = quintic_coefficients();
  // Horner evaluation of the normalized-time polynomial.
  Jet4 beta(zeta[5]);
  for (int j = 4; j >= 0; --j) beta = beta * s + zeta[static_cast<size_t>(j)];
  return beta;
}

int feature_coordinate_count(int n) { return n == 1 ? 6 : (n == 2 ? 8 : 9); }

Eigen::VectorXd pack_features(const DeformationFeatures& f) {
  Eigen::VectorXd v(feature_coordinate_count(f.n));
  int k = 0;
  v(k++) = f.lambda1;
  if (f.n >= 2) v(k++) = f.lambda2;
  if (f.n >= 3) v(k++) = f.lambda3;
  if (f.n >= 2) v(k++) = f.phi_r;
  v(k++) = f.theta_r;
  v(k++) = f.psi_r;
  v(k++) = f.d.x();
  v(k++) = f.d.y();
  v(k++) = f.d.z();
  return v;
}

DeformationFeatures unpack_features(const Eigen::VectorXd& values, int n, double theta_u,
                                    double psi_u) {
  if (values.size() != feature_coordinate_count(n))
    raise(Errc::schema_error, "feature coordinate length does not match the dimension");
  DeformationFeatures f;
  f.n = n;
  int k = 0;
  f.lambda1 = values(k++);
  if (n >= 2) f.lambda2 = values(k++);
  if (n >= 3) f.lambda3 = values(k++);
  if (n >= 2) f.phi_r = values(k++);
  f.theta_r = values(k++);
  f.psi_r = values(k++);
  f.d = Vec3(values(k), values(k + 1), values(k + 2));
  if (n >= 2) {
    f.theta_u = theta_u;
    f.psi_u = psi_u;
  }
  if (n == 1) {
    f.theta_u = 0.0;
    f.psi_u = 0.0;
  }
  return f;
}

double Plan::total_duration() const {
  double total = 0.0;
  for (double d : durations) total += d;
  return total;
}

std::vector<Jet4> Plan::coordinate_jets(double t) const {
  if (waypoints.size() < 2 || durations.size() + 1 != waypoints.size())
    raise(Errc::schema_error, "plan needs k+1 waypoints for k segments");
  const double total = total_duration();
  if (t < -1e-9 || t > total + 1e-9) raise(Errc::out_of_segment, "time outside the plan");
  t = std::max(0.0, std::min(t, total));

  size_t segment = 0;
  double t_rel = t;
  while (segment + 1 < durations.size() && t_rel > durations[segment]) {
    t_rel -= durations[segment];
    ++segment;
  }
  const Jet4 beta = quintic_blend(std::min(t_rel, durations[segment]), durations[segment]);
  const Eigen::VectorXd& a = waypoints[segment];
  const Eigen::VectorXd& b = waypoints[segment + 1];
  std::vector<Jet4> out(static_cast<size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out[static_cast<size_t>(i)] = Jet4(a(i)) + beta * (b(i) - a(i));
  return out;
}

Eigen::VectorXd Plan::coordinate(double t) const {
  std::vector<Jet4> jets = coordinate_jets(t);
  Eigen::VectorXd v(static_cast<Eigen::Index>(jets.size()));
  for (size_t i = 0; i < jets.size(); ++i) v(static_cast<Eigen::Index>(i)) = jets[i].value();
  return v;
}

void Plan::validate(const ReferenceConfiguration& cfg) const {
  if (n != cfg.n) raise(Errc::schema_error, "plan dimension does not match the configuration");
  if (waypoints.size() < 2) raise(Errc::schema_error, "plan needs at least two waypoints");
  if (durations.size() + 1 != waypoints.size())
    raise(Errc::schema_error, "plan needs one duration per segment");
  for (double d : durations)
    if (d <= 0.0) raise(Errc::schema_error, "segment durations must be positive");
  const Eigen::Index expected =
      (mode == PlanMode::obstacle_free)
          ? feature_coordinate_count(n)
          : static_cast<Eigen::Index>(n) * (n + 1);
  for (const Eigen::VectorXd& w : waypoints)
    if (w.size() != expected) raise(Errc::schema_error, "waypoint length does not match the mode");
  if (mode == PlanMode::obstacle_free) {
    for (const Eigen::VectorXd& w : waypoints)
      (void)build_deformation(unpack_features(w, n, stretch_theta_u, stretch_psi_u));
  } else {
    if (static_cast<int>(vcs_reference.size()) != n + 1)
      raise(Errc::schema_error, "vertex-space plan needs the reference simplex vertices");
    if (simplex_rank(vcs_reference) != n)
      raise(Errc::degenerate_simplex, "reference simplex is degenerate");
  }
}

namespace {

using JVec3 = std::array<Jet4, 3>;
using JMat3 = std::array<std::array<Jet4, 3>, 3>;

// Rotation-matrix layout with jet-valued angles.
JMat3 rotation_jets(const Jet4& b1, const Jet4& b2, const Jet4& b3) {
  Jet4 s1, c1, s2, c2, s3, c3;
  sincos(b1, s1, c1);
  sincos(b2, s2, c2);
  sincos(b3, s3, c3);
  JMat3 r;
  r[0][0] = c2 * c3;
  r[0][1] = c2 * s3;
  r[0][2] = -s2;
  r[1][0] = s1 * s2 * c3 - c1 * s3;
  r[1][1] = s1 * s2 * s3 + c1 * c3;
  r[1][2] = s1 * c2;
  r[2][0] = c1 * s2 * c3 + s1 * s3;
  r[2][1] = c1 * s2 * s3 - s1 * c3;
  r[2][2] = c1 * c2;
  return r;
}

std::array<Vec3, 5> derivatives_of(const JVec3& p) {
  std::array<Vec3, 5> out;
  for (int order = 0; order <= 4; ++order)
    out[static_cast<size_t>(order)] =
        Vec3(p[0].derivative(order), p[1].derivative(order), p[2].derivative(order));
  return out;
}

}  // namespace

std::vector<std::array<Vec3, 5>> leaders_from_features(const ReferenceConfiguration& cfg,
                                                       const std::vector<Jet4>& coords,
                                                       double theta_u, double psi_u) {
  const int n = cfg.n;
  if (static_cast<int>(coords.size()) != feature_coordinate_count(n))
    raise(Errc::schema_error, "feature coordinate length does not match the dimension");
  size_t k = 0;
  std::array<Jet4, 3> lambda = {Jet4(1.0), Jet4(1.0), Jet4(1.0)};
  lambda[0] = coords[k++];
  if (n >= 2) lambda[1] = coords[k++];
  if (n >= 3) lambda[2] = coords[k++];
  for (int i = 0; i < 3; ++i)
    if (lambda[static_cast<size_t>(i)].value() <= 0.0)
      raise(Errc::invalid_feature, "stretches must stay positive along the plan");
  const Jet4 phi_r = (n >= 2) ? coords[k++] : Jet4(0.0);
  const Jet4 theta_r = coords[k++];
  const Jet4 psi_r = coords[k++];
  const JVec3 d = {coords[k], coords[k + 1], coords[k + 2]};

  // Stretch directions are constant along the plan.
  const Mat3 basis = rotation_matrix(0.0, theta_u, psi_u);
  JMat3 stretch;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Jet4 acc;
      for (int m = 0; m < 3; ++m)
        acc += lambda[static_cast<size_t>(m)] * (basis(m, i) * basis(m, j));
      stretch[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
    }

  const JMat3 rot = rotation_jets(phi_r, theta_r, psi_r);
  // Q = R^T * U, with R^T acting as the active rotation.
  JMat3 q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Jet4 acc;
      for (int m = 0; m < 3; ++m)
        acc += rot[static_cast<size_t>(m)][static_cast<size_t>(i)] *
               stretch[static_cast<size_t>(m)][static_cast<size_t>(j)];
      q[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
    }

  std::vector<std::array<Vec3, 5>> out;
  out.reserve(cfg.leaders.size());
  for (int id : cfg.leaders) {
    const Vec3 r0 = cfg.positions.at(id);
    JVec3 p;
    for (int i = 0; i < 3; ++i) {
      Jet4 acc = d[static_cast<size_t>(i)];
      for (int j = 0; j < 3; ++j)
        acc += q[static_cast<size_t>(i)][static_cast<size_t>(j)] * r0(j);
      p[static_cast<size_t>(i)] = acc;
    }
    out.push_back(derivatives_of(p));
  }
  return out;
}

std::vector<std::array<Vec3, 5>> leaders_from_vertices(const ReferenceConfiguration& cfg,
                                                       const std::vector<Vec3>& vcs_reference,
                                                       const std::vector<Jet4>& coords) {
  const int n = cfg.n;
  const int vertices = n + 1;
  if (static_cast<int>(coords.size()) != n * vertices)
    raise(Errc::schema_error, "vertex coordinate length does not match the dimension");
  if (static_cast<int>(vcs_reference.size()) != vertices)
    raise(Errc::schema_error, "reference simplex needs n+1 vertices");

  // Vertex positions: the n in-plane components come from the generalized
  // coordinate (vertex-major layout), the rest stay at their reference values.
  std::vector<JVec3> vertex_jets(static_cast<size_t>(vertices));
  for (int v = 0; v < vertices; ++v) {
    for (int axis = 0; axis < 3; ++axis)
      vertex_jets[static_cast<size_t>(v)][static_cast<size_t>(axis)] =
          Jet4(vcs_reference[static_cast<size_t>(v)](axis));
    for (int axis = 0; axis < n; ++axis)
      vertex_jets[static_cast<size_t>(v)][static_cast<size_t>(axis)] =
          coords[static_cast<size_t>(v * n + axis)];
  }

  std::vector<std::array<Vec3, 5>> out;
  out.reserve(cfg.leaders.size());
  for (int id : cfg.leaders) {
    Eigen::VectorXd weights = barycentric(vcs_reference, cfg.positions.at(id), n);
    JVec3 p;
    for (int axis = 0; axis < 3; ++axis) {
      Jet4 acc;
      for (int v = 0; v < vertices; ++v)
        acc += weights(v) * vertex_jets[static_cast<size_t>(v)][static_cast<size_t>(axis)];
      p[static_cast<size_t>(axis)] = acc;
    }
    out.push_back(derivatives_of(p));
  }
  return out;
}

LeaderMotion plan_leader_motion(const Plan& plan, const ReferenceConfiguration& cfg) {
  plan.validate(cfg);
  Plan captured = plan;
  ReferenceConfiguration cfg_captured = cfg;
  return [captured, cfg_captured](int ordinal, double t) {
    // The plan ends at rest, so holding the endpoints extends it exactly;
    // integrator step counts may land a rounding error past the end.
    t = std::max(0.0, std::min(t, captured.total_duration()));
    const std::vector<Jet4> coords = captured.coordinate_jets(t);
    std::vector<std::array<Vec3, 5>> leaders;
    if (captured.mode == PlanMode::obstacle_free)
      leaders = leaders_from_features(cfg_captured, coords, captured.stretch_theta_u,
                                      captured.stretch_psi_u);
    else
      leaders = leaders_from_vertices(cfg_captured, captured.vcs_reference, coords);
    return leaders.at(static_cast<size_t>(ordinal));
  };
}

PlanSamples sample_plan(const Plan& plan, const ReferenceConfiguration& cfg, double dt) {
  plan.validate(cfg);
  if (dt <= 0.0) raise(Errc::schema_error, "sampling step must be positive");
  LeaderMotion motion = plan_leader_motion(plan, cfg);
  const double total = plan.total_duration();
  const int steps = static_cast<int>(std::llround(total / dt));
  std::vector<Vec3> refs = cfg.leader_positions();

  PlanSamples out;
  out.times.reserve(static_cast<size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(total, k * dt);
    std::vector<Vec3> now(refs.size());
    for (size_t l = 0; l < refs.size(); ++l) now[l] = motion(static_cast<int>(l), t)[0];
    Decomposition dec = decompose(cfg.n, refs, now);
    out.times.push_back(t);
    out.transforms.push_back(dec.transform);
    out.features.push_back(dec.features);
  }
  return out;
}

namespace {

bool simplex_box_intersect(const VcsPlacement& pts, const Vec3& lo, const Vec3& hi) {
  const Vec3 center = 0.5 * (lo + hi);
  const Vec3 half = 0.5 * (hi - lo);

  auto separated_along = [&](const Vec3& axis) {
    const double len = axis.norm();
    if (len < 1e-12) return false;  // degenerate axis carries no information
    double pts_min = std::numeric_limits<double>::infinity();
    double pts_max = -pts_min;
    for (const Vec3& p : pts) {
      const double v = axis.dot(p);
      pts_min = std::min(pts_min, v);
      pts_max = std::max(pts_max, v);
    }
    const double box_center = axis.dot(center);
    const double box_radius = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) +
                              half.z() * std::abs(axis.z());
    return pts_max < box_center - box_radius || pts_min > box_center + box_radius;
  };

  for (int a = 0; a < 3; ++a)
    if (separated_along(Vec3::Unit(a))) return false;

  std::vector<Vec3> edges;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) edges.push_back(pts[j] - pts[i]);

  // Face normals: every cross product of two edges (covers the triangle plane
  // normal and all tetrahedron faces).
  for (size_t i = 0; i < edges.size(); ++i)
    for (size_t j = i + 1; j < edges.size(); ++j)
      if (separated_along(edges[i].cross(edges[j]))) return false;

  for (const Vec3& e : edges)
    for (int a = 0; a < 3; ++a)
      if (separated_along(e.cross(Vec3::Unit(a)))) return false;

  return true;
}

}  // namespace

bool placement_shape_valid(const VcsPlacement& placement, const VcsPlacement& reference, int n,
                           const SearchParams& params) {
  if (simplex_rank(placement) != n) return false;
  if (params.stretch_floor > 0.0) {
    try {
      Decomposition dec = decompose(n, reference, placement);
      if (dec.features.min_in_scope_stretch() < params.stretch_floor - 1e-12) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

bool placement_clear(const ObstacleMap& map, const VcsPlacement& placement,
                     const SearchParams& params) {
  for (const Vec3& v : placement)
    for (int a = 0; a < 3; ++a)
      if (v(a) < map.workspace_lo(a) - 1e-9 || v(a) > map.workspace_hi(a) + 1e-9) return false;
  // Obstacles grown by the inflation radius stand in for inflating the
  // simplex itself; slightly conservative at box corners.
  for (const ObstacleBox& box : map.boxes) {
    const Vec3 grow = Vec3::Constant(params.inflation);
    if (simplex_box_intersect(placement, box.lo - grow, box.hi + grow)) return false;
  }
  return true;
}

bool placement_valid(const ObstacleMap& map, const VcsPlacement& placement,
                     const VcsPlacement& reference, int n, const SearchParams& params) {
  if (placement.size() != static_cast<size_t>(n + 1)) return false;
  return placement_clear(map, placement, params) &&
         placement_shape_valid(placement, reference, n, params);
}

namespace {

// Fixed-size lattice key: at most (n+1)*n = 12 integer coordinates. Keeps the
// open/closed bookkeeping allocation-free.
struct LatticeKey {
  std::array<int16_t, 12> v{};
  friend bool operator==(const LatticeKey&, const LatticeKey&) = default;
  friend bool operator<(const LatticeKey& a, const LatticeKey& b) { return a.v < b.v; }
  friend bool operator>(const LatticeKey& a, const LatticeKey& b) { return a.v > b.v; }
};

struct LatticeKeyHash {
  size_t operator()(const LatticeKey& key) const {
    size_t h = 1469598103934665603ull;
    for (int16_t c : key.v) {
      h ^= static_cast<size_t>(static_cast<uint16_t>(c));
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct OpenEntry {
  double f;
  double h;
  LatticeKey key;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.key > b.key;  // deterministic lexicographic tie-break
  }
};

}  // namespace

SearchResult astar_plan(const ObstacleMap& map, const VcsPlacement& start,
                        const VcsPlacement& goal, const VcsPlacement& reference, int n,
                        const SearchParams& params) {
  const double g = map.resolution;
  if (g <= 0.0) raise(Errc::schema_error, "grid resolution must be positive");
  const int vertices = n + 1;

  auto to_key = [&](const VcsPlacement& placement) {
    LatticeKey key;
    for (int v = 0; v < vertices; ++v)
      for (int a = 0; a < n; ++a) {
        const double c = placement[static_cast<size_t>(v)](a);
        const double q = std::round(c / g);
        if (std::abs(c - q * g) > 1e-6)
          raise(Errc::invalid_endpoint, "simplex vertices must lie on the grid");
        if (std::abs(q) > 30000) raise(Errc::invalid_endpoint, "grid coordinate out of range");
        key.v[static_cast<size_t>(v * n + a)] = static_cast<int16_t>(q);
      }
    return key;
  };
  auto to_placement = [&](const LatticeKey& key) {
    VcsPlacement placement(static_cast<size_t>(vertices));
    for (int v = 0; v < vertices; ++v) {
      placement[static_cast<size_t>(v)] = reference[static_cast<size_t>(v)];
      for (int a = 0; a < n; ++a)
        placement[static_cast<size_t>(v)](a) = key.v[static_cast<size_t>(v * n + a)] * g;
    }
    return placement;
  };

  if (static_cast<int>(start.size()) != vertices || static_cast<int>(goal.size()) != vertices)
    raise(Errc::invalid_endpoint, "endpoint simplex needs n+1 vertices");
  if (!placement_valid(map, start, reference, n, params) ||
      !placement_valid(map, goal, reference, n, params))
    raise(Errc::invalid_endpoint, "endpoint placement violates the validity constraints");

  const LatticeKey start_key = to_key(start);
  const LatticeKey goal_key = to_key(goal);

  auto heuristic = [&](const LatticeKey& key) {
    double sum = 0.0;
    for (int v = 0; v < vertices; ++v) {
      double norm2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double diff =
            (key.v[static_cast<size_t>(v * n + a)] - goal_key.v[static_cast<size_t>(v * n + a)]) *
            g;
        norm2 += diff * diff;
      }
      sum += norm2;
    }
    return std::sqrt(sum);
  };

  // The stretch/rank part of validity is translation invariant, so it is
  // memoized on the shape (vertex offsets relative to the first vertex).
  std::unordered_map<LatticeKey, bool, LatticeKeyHash> shape_cache;
  auto valid_cached = [&](const LatticeKey& key) {
    const VcsPlacement placement = to_placement(key);
    if (!placement_clear(map, placement, params)) return false;
    LatticeKey shape;
    for (int v = 0; v < vertices; ++v)
      for (int a = 0; a < n; ++a)
        shape.v[static_cast<size_t>(v * n + a)] = static_cast<int16_t>(
            key.v[static_cast<size_t>(v * n + a)] - key.v[static_cast<size_t>(a)]);
    auto it = shape_cache.find(shape);
    if (it != shape_cache.end()) return it->second;
    const bool ok = placement_shape_valid(placement, reference, n, params);
    shape_cache.emplace(shape, ok);
    return ok;
  };

  std::unordered_map<LatticeKey, double, LatticeKeyHash> best_g;
  std::unordered_map<LatticeKey, LatticeKey, LatticeKeyHash> parent;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;

  best_g[start_key] = 0.0;
  open.push({heuristic(start_key), heuristic(start_key), start_key});

  SearchResult result;
  bool found = false;
  while (!open.empty()) {
    OpenEntry entry = open.top();
    open.pop();
    const double g_here = best_g.at(entry.key);
    if (entry.f > g_here + entry.h + 1e-12) continue;  // stale queue entry
    if (entry.key == goal_key) {
      found = true;
      result.cost = g_here;
      break;
    }
    if (++result.expanded > params.max_expansions)
      raise(Errc::no_path, "expansion budget exhausted");

    auto try_successor = [&](const LatticeKey& key, double step_cost) {
      const double tentative = g_here + step_cost;
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= tentative + 1e-12) return;
      if (!valid_cached(key)) return;
      best_g[key] = tentative;
      parent[key] = entry.key;
      const double h = heuristic(key);
      open.push({tentative + h, h, key});
    };

    for (int a = 0; a < n; ++a) {
      for (int dir : {-1, 1}) {
        // Rigid move: every vertex shifts one grid step along the axis.
        LatticeKey rigid = entry.key;
        for (int v = 0; v < vertices; ++v)
          rigid.v[static_cast<size_t>(v * n + a)] = static_cast<int16_t>(
              rigid.v[static_cast<size_t>(v * n + a)] + dir);
        try_successor(rigid, vertices * g);
        // Shape moves: a single vertex shifts.
        for (int v = 0; v < vertices; ++v) {
          LatticeKey shape = entry.key;
          shape.v[static_cast<size_t>(v * n + a)] = static_cast<int16_t>(
              shape.v[static_cast<size_t>(v * n + a)] + dir);
          try_successor(shape, g);
        }
      }
    }
  }

  if (!found) raise(Errc::no_path, "open set exhausted before reaching the goal");

  std::vector<LatticeKey> chain = {goal_key};
  while (chain.back() != start_key) chain.push_back(parent.at(chain.back()));
  std::reverse(chain.begin(), chain.end());
  for (const auto& key : chain) result.waypoints.push_back(to_placement(key));

  // Admissibility audit along the returned path: the heuristic must never
  // exceed the true remaining cost.
  double accumulated = 0.0;
  for (size_t k = 0; k < chain.size(); ++k) {
    if (k > 0) {
      for (int v = 0; v < vertices; ++v) {
        double norm2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double diff = (chain[k].v[static_cast<size_t>(v * n + a)] -
                               chain[k - 1].v[static_cast<size_t>(v * n + a)]) *
                              g;
          norm2 += diff * diff;
        }
        accumulated += std::sqrt(norm2);
      }
    }
    result.worst_heuristic_slack =
        std::max(result.worst_heuristic_slack, heuristic(chain[k]) - (result.cost - accumulated));
  }
  return result;
}

Plan plan_from_placements(const std::vector<VcsPlacement>& placements, int n,
                          const VcsPlacement& reference, const std::vector<double>& durations) {
  if (placements.size() < 2) raise(Errc::schema_error, "need at least two placements");

  auto to_coords = [&](const VcsPlacement& p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()) * n);
    for (size_t vert = 0; vert < p.size(); ++vert)
      for (int a = 0; a < n; ++a) v(static_cast<Eigen::Index>(vert) * n + a) = p[vert](a);
    return v;
  };

  std::vector<Eigen::VectorXd> merged;
  merged.push_back(to_coords(placements.front()));
  for (size_t k = 1; k + 1 < placements.size(); ++k) {
    const Eigen::VectorXd prev = merged.back();
    const Eigen::VectorXd cur = to_coords(placements[k]);
    const Eigen::VectorXd next = to_coords(placements[k + 1]);
    const Eigen::VectorXd a = cur - prev;
    const Eigen::VectorXd b = next - cur;
    // Collinear consecutive steps collapse into one segment.
    const bool collinear = a.norm() > 0 && b.norm() > 0 &&
                           (a.normalized() - b.normalized()).norm() < 1e-9;
    if (!collinear) merged.push_back(cur);
  }
  merged.push_back(to_coords(placements.back()));

  Plan plan;
  plan.mode = PlanMode::obstacle_laden;
  plan.n = n;
  plan.vcs_reference = reference;
  plan.waypoints = merged;
  if (durations.size() == 1)
    plan.durations.assign(merged.size() - 1, durations.front());
  else if (durations.size() == merged.size() - 1)
    plan.durations = durations;
  else
    raise(Errc::schema_error, "expected one duration or one per merged segment");
  return plan;
}

bool segment_feasible(const ReferenceConfiguration& cfg, const WeightModel& model,
                      const GainSet& gains, const Plan& segment,
                      const TravelTimeParams& params) {
  SimOptions opt;
  opt.dt = params.dt;
  opt.duration = segment.total_duration();
  opt.record_stride = std::max<int>(1, static_cast<int>(opt.duration / params.dt));
  opt.bounds = params.bounds;
  opt.bounds.hard_fail_on_saturation = true;
  try {
    TeamTrajectory traj = simulate_team(cfg, model, plan_leader_motion(segment, cfg), gains, opt);
    return traj.sup_deviation <= params.delta;
  } catch (const Error& e) {
    if (e.code() == Errc::input_saturated || e.code() == Errc::guard_tripped) return false;
    throw;
  }
}

double min_travel_time(const ReferenceConfiguration& cfg, const WeightModel& model,
                       const GainSet& gains, const Plan& segment_template,
                       const TravelTimeParams& params) {
  if (segment_template.waypoints.size() != 2)
    raise(Errc::schema_error, "travel time applies to a single segment");
  if ((segment_template.waypoints[0] - segment_template.waypoints[1]).norm() < 1e-12)
    return params.t_min;

  auto with_duration = [&](double t) {
    Plan p = segment_template;
    p.durations = {t};
    return p;
  };

  double hi = params.t_min;
  double lo = 0.0;
  while (!segment_feasible(cfg, model, gains, with_duration(hi), params)) {
    lo = hi;
    hi *= 2.0;
    if (hi > params.t_cap)
      raise(Errc::infeasible_segment, "no feasible duration up to the configured cap");
  }
  if (lo == 0.0) return hi;  // already feasible at the floor

  while ((hi - lo) / hi > params.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (segment_feasible(cfg, model, gains, with_duration(mid), params))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace contdef
