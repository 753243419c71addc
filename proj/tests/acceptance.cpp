// Acceptance sweep: every release gate runs at its stated tolerance and
// prints one PASS/FAIL line. Run with criterion numbers as arguments to
// select a subset; exits nonzero if any selected gate fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

#include "engine.hpp"
#include "geometry.hpp"
#include "random_team.hpp"
#include "scenario.hpp"

using namespace contdef;

namespace {

struct Gate {
  int id;
  std::string title;
  std::function<std::pair<bool, std::string>()> run;
  double budget_seconds;
};

// ---------------------------------------------------------------------------
// 1. Tabulated weight reproduction at 1e-2 absolute.
std::pair<bool, std::string> weights_gate() {
  Scenario s = parse_scenario_text(builtin_table2_scenario());
  WeightModel model = compute_weights(s.cfg, s.graph);
  const double sixth = 1.0 / 6.0;
  const std::map<int, std::vector<double>> expected = {
      {5, {0.5, sixth, sixth, sixth}},  {6, {0.5, sixth, sixth, sixth}},
      {7, {0.5, sixth, sixth, sixth}},  {8, {0.5, sixth, sixth, sixth}},
      {9, {0.2, 0.2, 0.2, 0.4}},        {10, {0.2, 0.2, 0.2, 0.4}},
      {11, {0.2, 0.2, 0.2, 0.4}},       {12, {0.2, 0.2, 0.2, 0.4}},
      {13, {0.2, 0.2, 0.2, 0.4}},       {14, {-0.5, 0.5, 0.5, 0.5}},
      {15, {0.5, -0.5, 0.5, 0.5}},      {16, {0.5, 0.5, -0.5, 0.5}},
  };
  double worst = 0.0;
  int worst_row = 0, worst_col = 0;
  for (const auto& [id, weights] : expected) {
    const std::vector<int>& neigh = s.graph.neighbors_of(id);
    for (size_t k = 0; k < neigh.size(); ++k) {
      const double err = std::abs(model.real_weights.at(id).at(neigh[k]) - weights[k]);
      if (err > worst) {
        worst = err;
        worst_row = id;
        worst_col = neigh[k];
      }
    }
  }
  std::ostringstream detail;
  detail << "max |error| " << worst << " at follower " << worst_row << " weight on " << worst_col;
  if (worst > 1e-2)
    detail << "; exact solve of the two-decimal published positions yields 0.38688 for the "
              "displayed 0.4 entry (the table's weight columns are display-rounded), so the "
              "1e-2 gate is unattainable from the published data";
  return {worst <= 1e-2, detail.str()};
}

// 2. Minimum separation value and pair.
std::pair<bool, std::string> separation_gate() {
  Scenario s = parse_scenario_text(builtin_table2_scenario());
  SafetyParameters params = reference_metrics(s.cfg, s.vcs, s.safety.epsilon);
  const bool pair_ok = (params.closest_pair_a == 9 && params.closest_pair_b == 13) ||
                       (params.closest_pair_a == 13 && params.closest_pair_b == 9);
  const bool value_ok = std::abs(params.min_separation - 4.6607) <= 0.005;
  std::ostringstream detail;
  detail << "d_s " << params.min_separation << " m, pair (" << params.closest_pair_a << ", "
         << params.closest_pair_b << ")";
  return {pair_ok && value_ok, detail.str()};
}

// 3. Reference stretch angles.
std::pair<bool, std::string> angles_gate() {
  Scenario s = parse_scenario_text(builtin_table2_scenario());
  SafetyParameters params = reference_metrics(s.cfg, s.vcs, s.safety.epsilon);
  const bool ok = std::abs(params.theta_u0 - (-0.1721)) <= 0.01 &&
                  std::abs(params.psi_u0 - 0.7130) <= 0.01;
  std::ostringstream detail;
  detail << "theta_u0 " << params.theta_u0 << " rad, psi_u0 " << params.psi_u0 << " rad";
  return {ok, detail.str()};
}

// 4. Planar case-study constants.
std::pair<bool, std::string> planar_constants_gate() {
  ReferenceConfiguration cfg;
  cfg.n = 2;
  cfg.leaders = {1, 2, 3};
  cfg.positions = {{1, Vec3(0, 0, 0)},
                   {2, Vec3(5.5875, 0, 0)},
                   {3, Vec3(2.79375, 20.0, 0)}};
  VcsSimplex vcs;
  vcs.reference_vertices = {Vec3(-50, -4.5358, 0), Vec3(50, -4.5358, 0), Vec3(0, 50, 0)};
  SafetyParameters params = reference_metrics(cfg, vcs, 0.5);
  const double delta = params.deviation_for_stretch_floor(0.32);
  const bool ok = std::abs(params.max_deviation_bound - 2.2938) <= 1e-4 &&
                  std::abs(delta - 0.3940) <= 1e-4;
  std::ostringstream detail;
  detail << "delta_max " << params.max_deviation_bound << " m, delta " << delta << " m";
  return {ok, detail.str()};
}

// 5. Decomposition round trips, 1000 random feature vectors per dimension.
std::pair<bool, std::string> roundtrip_gate() {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> stretch(0.3, 2.5);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<Vec3> ref;
    if (n == 1)
      ref = {Vec3(-3, 0, 0), Vec3(2, 0, 0)};
    else if (n == 2)
      ref = {Vec3(0, 0, 0), Vec3(4, 0.5, 0), Vec3(1, 3, 0)};
    else
      ref = {Vec3(-30, -40, 0), Vec3(-30, 40, 0), Vec3(50, 0, 0), Vec3(0, 0, 60)};
    for (int trial = 0; trial < 1000; ++trial) {
      DeformationFeatures f;
      f.n = n;
      f.lambda1 = stretch(rng);
      f.d = Vec3(shift(rng), shift(rng), shift(rng));
      f.theta_r = angle(rng);
      f.psi_r = angle(rng);
      if (n >= 2) {
        f.lambda2 = stretch(rng);
        if (f.lambda2 > f.lambda1) std::swap(f.lambda1, f.lambda2);
        f.psi_u = angle(rng);
        f.phi_r = angle(rng);
      }
      if (n == 3) {
        f.lambda3 = stretch(rng);
        if (f.lambda3 > f.lambda2) std::swap(f.lambda2, f.lambda3);
        if (f.lambda2 > f.lambda1) std::swap(f.lambda1, f.lambda2);
        f.phi_u = angle(rng);
        f.theta_u = angle(rng);
      }
      HomogeneousTransform ht = build_deformation(f);
      std::vector<Vec3> now(ref.size());
      for (size_t i = 0; i < ref.size(); ++i) now[i] = ht.apply(ref[i]);
      Decomposition dec = decompose(n, ref, now);
      // Angle wrapping makes the rebuilt transform the invariant object.
      const double q_err = (dec.transform.q - ht.q).norm() / ht.q.norm();
      const double d_err = (dec.transform.d - ht.d).norm() / (1.0 + ht.d.norm());
      worst = std::max({worst, q_err, d_err});
    }
  }
  std::ostringstream detail;
  detail << "3000 syntheses, worst relative reconstruction error " << worst;
  return {worst <= 1e-8, detail.str()};
}

// 6. Leader-map properties across the bundled and random teams.
std::pair<bool, std::string> leader_map_gate() {
  Scenario s = parse_scenario_text(builtin_table2_scenario());
  double worst_row_sum = 0.0, worst_alpha = 0.0, worst_abscissa = -1e9;
  auto audit = [&](const ReferenceConfiguration& cfg, const CommGraph& graph) {
    WeightModel model = compute_weights(cfg, graph);
    Eigen::VectorXd sums = model.leader_map.rowwise().sum();
    for (int i = 0; i < sums.size(); ++i)
      worst_row_sum = std::max(worst_row_sum, std::abs(sums(i) - 1.0));
    for (int id : model.followers) {
      Eigen::VectorXd alpha = leader_expansion(cfg, id);
      const int row = model.follower_index(id);
      for (int j = 0; j < alpha.size(); ++j)
        worst_alpha = std::max(worst_alpha, std::abs(model.leader_map(row, j) - alpha(j)));
    }
    worst_abscissa = std::max(worst_abscissa, max_eigenvalue_real_part(model.a));
  };
  audit(s.cfg, s.graph);
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> followers(2, 33);
  std::uniform_int_distribution<int> aux(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    fixtures::RandomTeam team = fixtures::make_random_team(rng, dim(rng), followers(rng), aux(rng));
    audit(team.cfg, team.graph);
  }
  std::ostringstream detail;
  detail << "101 teams: worst row-sum error " << worst_row_sum << ", worst map-vs-expansion error "
         << worst_alpha << ", largest eigenvalue real part " << worst_abscissa;
  return {worst_row_sum <= 1e-9 && worst_alpha <= 1e-9 && worst_abscissa < 0.0, detail.str()};
}

// 7. Closed-loop collective takeoff.
std::pair<bool, std::string> takeoff_gate() {
  Table2Outcome outcome = reproduce_table2();
  const bool dev_ok = outcome.sup_deviation <= 0.67;
  const bool sep_ok = outcome.min_desired_separation >= 1.0;
  std::ostringstream detail;
  detail << "sup deviation " << outcome.sup_deviation << " m (gate 0.67 m), min desired pairwise "
         << outcome.min_desired_separation << " m (gate 1 m)";
  return {dev_ok && sep_ok, detail.str()};
}

// 8. Relaxed certificate accepts what the conservative one rejects, and the
// brute-force pairwise audit confirms it.
std::pair<bool, std::string> relaxed_gate() {
  ReferenceConfiguration cfg;
  cfg.n = 2;
  cfg.leaders = {1, 2, 3};
  cfg.followers = {4};
  cfg.positions = {{1, Vec3(0, 0, 0)},
                   {2, Vec3(2, 0.1, 0)},
                   {3, Vec3(4, -0.1, 0)},
                   {4, Vec3(1, 0, 0)}};
  SafetyParameters params = reference_metrics(cfg, std::nullopt, 0.1);
  params.delta = 0.15;

  std::vector<DeformationFeatures> features;
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) {
    const double s = k / 200.0;
    DeformationFeatures f;
    f.n = 2;
    f.lambda1 = 1.0 - 0.5 * std::sin(M_PI * s) * (1.0 - params.relaxed_stretch_floor());
    f.lambda2 = 1.0 + (0.05 - 1.0) * s;
    f.psi_r = 1.2 * s;
    f.d = Vec3(5.0 * s, -1.0 * s, 0.0);
    features.push_back(f);
    times.push_back(10.0 * s);
  }
  std::vector<HomogeneousTransform> transforms;
  for (const auto& f : features) transforms.push_back(build_deformation(f));

  ConditionReport relaxed = check_relaxed(transforms, times, params);
  ConditionReport conservative = check_conservative(features, times, params);
  ConditionReport oracle = check_pairwise_desired(cfg, times, transforms, params);
  std::ostringstream detail;
  detail << "relaxed margin " << relaxed.margin << ", conservative margin " << conservative.margin
         << ", pairwise-oracle margin " << oracle.margin;
  return {relaxed.pass && !conservative.pass && oracle.pass, detail.str()};
}

// Shared machinery for gate 9: uniform-cost oracle over the same moves.
double ucs_cost(const ObstacleMap& map, const VcsPlacement& start, const VcsPlacement& goal,
                const SearchParams& params, bool& found) {
  using Key = std::array<int16_t, 6>;
  struct KeyHash {
    size_t operator()(const Key& key) const {
      size_t h = 1469598103934665603ull;
      for (int16_t c : key) {
        h ^= static_cast<size_t>(static_cast<uint16_t>(c));
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  const double g = map.resolution;
  const int n = 2, vertices = 3;
  auto key_of = [&](const VcsPlacement& p) {
    Key key{};
    for (int v = 0; v < vertices; ++v)
      for (int a = 0; a < n; ++a)
        key[static_cast<size_t>(v * n + a)] =
            static_cast<int16_t>(std::llround(p[static_cast<size_t>(v)](a) / g));
    return key;
  };
  auto place_of = [&](const Key& key) {
    VcsPlacement p(static_cast<size_t>(vertices));
    for (int v = 0; v < vertices; ++v) {
      p[static_cast<size_t>(v)] = start[static_cast<size_t>(v)];
      for (int a = 0; a < n; ++a)
        p[static_cast<size_t>(v)](a) = key[static_cast<size_t>(v * n + a)] * g;
    }
    return p;
  };
  // Shape validity is translation invariant; memoize it per normalized shape
  // so the oracle spends its time searching, not re-deriving stretches.
  std::unordered_map<Key, bool, KeyHash> shape_cache;
  auto valid = [&](const Key& key) {
    const VcsPlacement placement = place_of(key);
    if (!placement_clear(map, placement, params)) return false;
    Key shape{};
    for (int v = 0; v < vertices; ++v)
      for (int a = 0; a < n; ++a)
        shape[static_cast<size_t>(v * n + a)] =
            static_cast<int16_t>(key[static_cast<size_t>(v * n + a)] - key[static_cast<size_t>(a)]);
    auto it = shape_cache.find(shape);
    if (it != shape_cache.end()) return it->second;
    const bool ok = placement_shape_valid(placement, start, n, params);
    shape_cache.emplace(shape, ok);
    return ok;
  };
  using Entry = std::pair<double, Key>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_map<Key, double, KeyHash> dist;
  const Key start_key = key_of(start);
  const Key goal_key = key_of(goal);
  dist[start_key] = 0.0;
  open.push({0.0, start_key});
  while (!open.empty()) {
    auto [d, key] = open.top();
    open.pop();
    if (d > dist.at(key) + 1e-12) continue;
    if (key == goal_key) {
      found = true;
      return d;
    }
    auto relax = [&](const Key& next, double cost) {
      const double nd = d + cost;
      auto it = dist.find(next);
      if (it != dist.end() && it->second <= nd + 1e-12) return;
      if (!valid(next)) return;
      dist[next] = nd;
      open.push({nd, next});
    };
    for (int a = 0; a < n; ++a) {
      for (int dir : {-1, 1}) {
        Key rigid = key;
        for (int v = 0; v < vertices; ++v)
          rigid[static_cast<size_t>(v * n + a)] =
              static_cast<int16_t>(rigid[static_cast<size_t>(v * n + a)] + dir);
        relax(rigid, vertices * g);
        for (int v = 0; v < vertices; ++v) {
          Key shape = key;
          shape[static_cast<size_t>(v * n + a)] =
              static_cast<int16_t>(shape[static_cast<size_t>(v * n + a)] + dir);
          relax(shape, g);
        }
      }
    }
  }
  found = false;
  return 0.0;
}

// 9. Search optimality against the oracle plus the squeeze fixture.
std::pair<bool, std::string> search_gate() {
  auto triangle = [](double x, double y, double legs) {
    return VcsPlacement{Vec3(x, y, 0), Vec3(x + legs, y, 0), Vec3(x, y + legs, 0)};
  };
  SearchParams params;
  params.stretch_floor = 0.3;

  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> dx(0, 1);
  std::uniform_int_distribution<int> dy(-1, 1);
  std::uniform_int_distribution<int> wall_x(2, 3);
  std::uniform_int_distribution<int> wall_gap(0, 3);
  int agreements = 0, solvable = 0;
  double worst_slack = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    // Solvable by construction: the start sits level with the wall gap and
    // the goal is strictly beyond the wall.
    ObstacleMap map;
    map.workspace_lo = Vec3(-1, -1, -1);
    map.workspace_hi = Vec3(10, 7, 1);
    const double x = wall_x(rng) + 0.25;
    const double gap_lo = wall_gap(rng);
    map.boxes.push_back({Vec3(x, gap_lo + 2.5, -1), Vec3(x + 0.5, 8.0, 1)});
    if (gap_lo > 0) map.boxes.push_back({Vec3(x, -2.0, -1), Vec3(x + 0.5, gap_lo - 0.5, 1)});
    VcsPlacement start = triangle(0, gap_lo, 2);
    const double goal_y = std::max(0.0, std::min(4.0, gap_lo + dy(rng)));
    VcsPlacement goal = triangle(dx(rng) + 4.0, goal_y, 2);
    bool astar_found = true;
    double astar_value = 0.0;
    try {
      SearchResult res = astar_plan(map, start, goal, start, 2, params);
      astar_value = res.cost;
      worst_slack = std::max(worst_slack, res.worst_heuristic_slack);
    } catch (const Error&) {
      astar_found = false;
    }
    bool oracle_found = false;
    const double oracle_value = ucs_cost(map, start, goal, params, oracle_found);
    if (astar_found != oracle_found) {
      return {false, "search and oracle disagree on reachability at trial " +
                         std::to_string(trial)};
    }
    if (astar_found) {
      ++solvable;
      if (astar_value == oracle_value) ++agreements;
    }
  }

  // Squeeze fixture: the corridor is narrower than the simplex at unit
  // stretch, so the plan must contract and recover.
  ObstacleMap squeeze;
  squeeze.workspace_lo = Vec3(-1, -1, -1);
  squeeze.workspace_hi = Vec3(13, 9, 1);
  squeeze.boxes.push_back({Vec3(5.25, 3.6, -1), Vec3(5.75, 10.0, 1)});
  squeeze.boxes.push_back({Vec3(5.25, -2.0, -1), Vec3(5.75, -0.6, 1)});
  SearchParams squeeze_params;
  squeeze_params.stretch_floor = 0.3;
  squeeze_params.inflation = 0.25;
  VcsPlacement start = triangle(0, 0, 4);
  VcsPlacement goal = triangle(8, 0, 4);
  SearchResult res = astar_plan(squeeze, start, goal, start, 2, squeeze_params);
  Plan plan = plan_from_placements(res.waypoints, 2, start, {4.0});

  ReferenceConfiguration cfg;
  cfg.n = 2;
  cfg.leaders = {1, 2, 3};
  cfg.positions = {{1, Vec3(0.5, 0.5, 0)}, {2, Vec3(3.0, 0.5, 0)}, {3, Vec3(0.5, 3.0, 0)}};
  PlanSamples samples = sample_plan(plan, cfg, 0.05);
  double min_stretch = 1e9;
  for (const DeformationFeatures& f : samples.features)
    min_stretch = std::min(min_stretch, f.min_in_scope_stretch());

  std::ostringstream detail;
  detail << solvable << "/50 instances solvable, " << agreements
         << " exact cost agreements, worst heuristic slack " << worst_slack
         << "; squeeze plan min stretch " << min_stretch;
  const bool ok = solvable > 0 && agreements == solvable && worst_slack <= 1e-9 &&
                  min_stretch < 1.0 && min_stretch >= 0.3 - 1e-9;
  return {ok, detail.str()};
}

// 10. Quintic coefficients, monotonicity and travel-time scaling.
std::pair<bool, std::string> quintic_gate() {
  const auto zeta = quintic_coefficients();
  const std::array<double, 6> expected = {0.0, 0.0, 0.0, 10.0, -15.0, 6.0};
  for (int j = 0; j < 6; ++j)
    if (zeta[static_cast<size_t>(j)] != expected[static_cast<size_t>(j)])
      return {false, "blend coefficients differ from (0,0,0,10,-15,6)"};

  for (int k = 0; k <= 1'000'000; ++k) {
    const double t = 7.0 * k / 1'000'000.0;
    if (quintic_blend(t, 7.0).derivative(1) < -1e-12)
      return {false, "blend slope negative at t=" + std::to_string(t)};
  }

  // Monotone feasibility across random rest-to-rest segments.
  ReferenceConfiguration cfg;
  cfg.n = 1;
  cfg.leaders = {1, 2};
  cfg.followers = {3};
  cfg.positions = {{1, Vec3(-5, 0, 0)}, {2, Vec3(5, 0, 0)}, {3, Vec3(1, 0, 0)}};
  CommGraph graph;
  graph.in_neighbors[3] = {1, 2};
  WeightModel model = compute_weights(cfg, graph);
  GainSet gains;
  TravelTimeParams params;
  params.t_min = 0.25;
  params.dt = 0.02;
  params.delta = 0.05;

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> move(2.0, 25.0);
  std::uniform_real_distribution<double> stretch(0.6, 1.6);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Plan segment;
    segment.mode = PlanMode::obstacle_free;
    segment.n = 1;
    DeformationFeatures a, b;
    a.n = b.n = 1;
    b.lambda1 = stretch(rng);
    b.d = Vec3(move(rng), move(rng) * 0.5, move(rng) * 0.25);
    segment.waypoints = {pack_features(a), pack_features(b)};
    segment.durations = {1.0};
    const double t_star = min_travel_time(cfg, model, gains, segment, params);
    auto feasible_at = [&](double t) {
      Plan p = segment;
      p.durations = {t};
      return segment_feasible(cfg, model, gains, p, params);
    };
    if (!feasible_at(t_star)) return {false, "t* not feasible at trial " + std::to_string(trial)};
    if (!feasible_at(2.0 * t_star))
      return {false, "doubling t* lost feasibility at trial " + std::to_string(trial)};
    if (t_star > params.t_min && feasible_at(0.8 * t_star))
      return {false, "t* not minimal at trial " + std::to_string(trial)};
    ++checked;
  }
  return {true, std::to_string(checked) + " segments, feasibility monotone under doubling"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Gate> gates = {
      {1, "tabulated weights within 1e-2", weights_gate, 1.0},
      {2, "minimum separation 4.6607 +/- 0.005 m at pair (9,13)", separation_gate, 1.0},
      {3, "reference stretch angles -0.1721/0.7130 +/- 0.01 rad", angles_gate, 1.0},
      {4, "planar constants delta_max 2.2938, delta 0.3940", planar_constants_gate, 1.0},
      {5, "decomposition round trips at 1e-8", roundtrip_gate, 5.0},
      {6, "leader-map properties on 101 teams", leader_map_gate, 10.0},
      {7, "collective takeoff deviation and separation gates", takeoff_gate, 60.0},
      {8, "relaxed accepts, conservative rejects, oracle confirms", relaxed_gate, 5.0},
      {9, "search optimality and squeeze fixture", search_gate, 30.0},
      {10, "quintic shape and monotone travel time", quintic_gate, 60.0},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Gate& gate : gates) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), gate.id) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      std::tie(pass, detail) = gate.run();
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > gate.budget_seconds) {
      pass = false;
      detail += " [over the " + std::to_string(gate.budget_seconds) + " s budget]";
    }
    std::printf("%s criterion %d: %s (%s) [%.2f s]\n", pass ? "PASS" : "FAIL", gate.id,
                gate.title.c_str(), detail.c_str(), seconds);
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
