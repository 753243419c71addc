#include "engine.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "geometry.hpp"

namespace contdef {

bool ValidationReport::pass() const {
  for (const ValidationCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const ValidationCheck& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  return out.str();
}

namespace {

ValidationCheck checked(const std::string& name, const std::function<void()>& body) {
  ValidationCheck check;
  check.name = name;
  try {
    body();
    check.pass = true;
  } catch (const std::exception& e) {
    check.pass = false;
    check.detail = e.what();
  }
  return check;
}

}  // namespace

ValidationReport run_validation(const Scenario& scenario) {
  ValidationReport report;
  const ReferenceConfiguration& cfg = scenario.cfg;

  report.checks.push_back(checked("initial transform orthogonal", [&] {
    if ((cfg.init_rotation.transpose() * cfg.init_rotation - Mat3::Identity()).norm() > 1e-9)
      raise(Errc::schema_error, "initial transform is not orthogonal");
  }));
  report.checks.push_back(checked("leaders span an n-D simplex", [&] {
    if (simplex_rank(cfg.leader_positions()) != cfg.n)
      raise(Errc::degenerate_simplex, "leader reference positions are degenerate");
  }));
  report.checks.push_back(checked("configuration well-formed", [&] { cfg.validate(); }));
  report.checks.push_back(
      checked("communication structure and reachability", [&] { validate_graph(cfg, scenario.graph); }));
  report.checks.push_back(checked("follower containment", [&] {
    // validate_graph covers containment; surface it as its own line by
    // re-running and translating only that error class.
    try {
      validate_graph(cfg, scenario.graph);
    } catch (const Error& e) {
      if (e.code() == Errc::containment_violated) throw;
    }
  }));
  report.checks.push_back(checked("simplices valid along the plan", [&] {
    if (!scenario.plan_request) return;
    Plan plan = build_plan(scenario);
    PlanSamples samples = sample_plan(plan, cfg, std::max(scenario.timing.dt * 50, 0.5));
    std::vector<Vec3> refs = cfg.leader_positions();
    for (size_t k = 0; k < samples.times.size(); ++k) {
      std::vector<Vec3> leaders(refs.size());
      for (size_t l = 0; l < refs.size(); ++l) leaders[l] = samples.transforms[k].apply(refs[l]);
      if (simplex_rank(leaders) != cfg.n)
        raise(Errc::degenerate_simplex,
              "leading simplex degenerates at t=" + std::to_string(samples.times[k]));
      if (scenario.vcs) {
        std::vector<Vec3> vcs(scenario.vcs->reference_vertices.size());
        for (size_t v = 0; v < vcs.size(); ++v)
          vcs[v] = samples.transforms[k].apply(scenario.vcs->reference_vertices[v]);
        if (simplex_rank(vcs) != cfg.n)
          raise(Errc::degenerate_simplex,
                "containment simplex degenerates at t=" + std::to_string(samples.times[k]));
      }
    }
  }));
  return report;
}

SafetyParameters derive_safety(const Scenario& scenario) {
  SafetyParameters params =
      reference_metrics(scenario.cfg, scenario.vcs, scenario.safety.epsilon);
  if (scenario.safety.delta) {
    params.delta = *scenario.safety.delta;
  } else {
    params.delta = params.deviation_for_stretch_floor(*scenario.safety.stretch_floor);
    if (params.delta <= 0.0)
      raise(Errc::schema_error, "configured stretch floor yields a non-positive deviation bound");
  }
  if (params.delta > params.max_deviation_bound + 1e-12)
    raise(Errc::schema_error, "deviation bound exceeds the admissible cap");
  return params;
}

std::string weights_text(const Scenario& scenario, const WeightModel& model) {
  std::ostringstream out;
  out << std::setprecision(6) << std::fixed;
  out << "follower-to-leader map (rows sum to one):\n";
  for (int id : model.followers) {
    out << "  " << std::setw(4) << id << ":";
    const int row = model.follower_index(id);
    for (Eigen::Index j = 0; j < model.leader_map.cols(); ++j)
      out << "  " << std::setw(10) << model.leader_map(row, j);
    out << "\n";
  }
  out << "real communication weights:\n";
  for (int id : model.followers) {
    out << "  " << std::setw(4) << id << ":";
    for (const auto& [j, w] : model.real_weights.at(id))
      out << "  " << j << ":" << std::setw(9) << w;
    out << "\n";
  }
  (void)scenario;
  return out.str();
}

namespace {

DeformationFeatures start_features(const Scenario& scenario, const SafetyParameters& params) {
  DeformationFeatures f;
  f.n = scenario.cfg.n;
  if (f.n >= 2) {
    f.theta_u = params.theta_u0;
    f.psi_u = params.psi_u0;
  }
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  rotation_angles(scenario.cfg.init_rotation.transpose(), b1, b2, b3);
  if (f.n >= 2) f.phi_r = b1;
  f.theta_r = b2;
  f.psi_r = b3;
  f.d = scenario.cfg.init_offset;
  return f;
}

double active_stretch_floor(const Scenario& scenario, const SafetyParameters& params) {
  return scenario.safety.mode == "relaxed" ? params.relaxed_stretch_floor()
                                           : params.conservative_stretch_floor();
}

}  // namespace

Plan build_plan(const Scenario& scenario) {
  if (!scenario.plan_request) raise(Errc::schema_error, "scenario carries no plan request");
  const PlanRequest& request = *scenario.plan_request;
  SafetyParameters params = derive_safety(scenario);

  TravelTimeParams travel;
  travel.t_min = scenario.timing.min_segment_time;
  travel.t_cap = scenario.timing.max_segment_time;
  travel.dt = scenario.timing.dt;
  travel.delta = params.delta;
  travel.bounds = scenario.bounds;

  if (request.mode == PlanMode::obstacle_free) {
    Plan plan;
    plan.mode = PlanMode::obstacle_free;
    plan.n = scenario.cfg.n;
    plan.stretch_theta_u = (scenario.cfg.n >= 2) ? params.theta_u0 : 0.0;
    plan.stretch_psi_u = (scenario.cfg.n >= 2) ? params.psi_u0 : 0.0;
    DeformationFeatures start = start_features(scenario, params);
    DeformationFeatures goal = *request.end_features;
    goal.theta_u = start.theta_u;
    goal.psi_u = start.psi_u;
    plan.waypoints = {pack_features(start), pack_features(goal)};
    if (request.duration) {
      plan.durations = {*request.duration};
    } else {
      Plan segment = plan;
      segment.durations = {1.0};
      WeightModel model = compute_weights(scenario.cfg, scenario.graph);
      plan.durations = {min_travel_time(scenario.cfg, model, scenario.gains, segment, travel)};
    }
    plan.validate(scenario.cfg);
    return plan;
  }

  if (!scenario.vcs)
    raise(Errc::schema_error, "obstacle-laden planning needs the containment simplex");
  const VcsPlacement& reference = scenario.vcs->reference_vertices;
  VcsPlacement start(reference.size());
  for (size_t v = 0; v < reference.size(); ++v)
    start[v] = scenario.cfg.init_rotation * reference[v] + scenario.cfg.init_offset;

  SearchParams search;
  search.inflation = params.epsilon + params.delta;
  search.stretch_floor = active_stretch_floor(scenario, params);
  SearchResult result =
      astar_plan(scenario.map, start, request.goal_vcs, reference, scenario.cfg.n, search);

  Plan plan = plan_from_placements(result.waypoints, scenario.cfg.n, reference,
                                   {request.duration ? *request.duration : 1.0});
  if (!request.duration) {
    WeightModel model = compute_weights(scenario.cfg, scenario.graph);
    for (size_t k = 0; k < plan.durations.size(); ++k) {
      Plan segment;
      segment.mode = PlanMode::obstacle_laden;
      segment.n = plan.n;
      segment.vcs_reference = plan.vcs_reference;
      segment.waypoints = {plan.waypoints[k], plan.waypoints[k + 1]};
      segment.durations = {1.0};
      plan.durations[k] = min_travel_time(scenario.cfg, model, scenario.gains, segment, travel);
    }
  }
  plan.validate(scenario.cfg);
  return plan;
}

TeamTrajectory run_simulation(const Scenario& scenario, const Plan& plan) {
  WeightModel model = compute_weights(scenario.cfg, scenario.graph);
  SimOptions opt;
  opt.dt = scenario.timing.dt;
  opt.duration = plan.total_duration();
  opt.record_stride = scenario.timing.output_stride;
  opt.bounds = scenario.bounds;
  return simulate_team(scenario.cfg, model, plan_leader_motion(plan, scenario.cfg),
                       scenario.gains, opt);
}

SafetyReport run_certification(const Scenario& scenario, const Plan& plan,
                               const TeamTrajectory* trajectory) {
  SafetyParameters params = derive_safety(scenario);
  TeamTrajectory owned;
  if (!trajectory) {
    owned = run_simulation(scenario, plan);
    trajectory = &owned;
  }

  SafetyReport report;
  report.mode = scenario.safety.mode;

  auto fragments = check_deviation_and_inputs(*trajectory, params, scenario.bounds);
  report.conditions.push_back(fragments[0]);

  if (scenario.safety.mode == "relaxed") {
    try {
      report.conditions.push_back(
          check_relaxed(trajectory->desired_transforms, trajectory->times, params));
    } catch (const Error& e) {
      if (e.code() != Errc::angles_not_constant) throw;
      ConditionReport fallback =
          check_conservative(trajectory->features, trajectory->times, params);
      fallback.detail += "; deformation angles drift, conservative floor applied";
      report.conditions.push_back(fallback);
    }
  } else {
    report.conditions.push_back(
        check_conservative(trajectory->features, trajectory->times, params));
  }

  // Hard audit independent of the sufficient conditions: desired positions
  // must keep at least one vehicle diameter between every pair.
  ConditionReport separation;
  separation.name = "desired separation above vehicle diameter";
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < trajectory->min_desired_separation.size(); ++k) {
    if (trajectory->min_desired_separation[k] < worst) {
      worst = trajectory->min_desired_separation[k];
      separation.worst_time = trajectory->times[k];
    }
  }
  separation.margin = worst - 2.0 * params.epsilon;
  separation.pass = separation.margin >= 0.0;
  separation.detail = "min desired pairwise distance " + std::to_string(worst);
  report.conditions.push_back(separation);

  ConditionReport containment;
  if (scenario.vcs) {
    std::vector<std::vector<Vec3>> positions(trajectory->times.size());
    for (size_t k = 0; k < trajectory->times.size(); ++k) {
      positions[k].reserve(trajectory->agents.size());
      for (size_t i = 0; i < trajectory->agents.size(); ++i)
        positions[k].push_back(trajectory->position_at(k, i));
    }
    containment = check_containment(trajectory->times, positions,
                                    trajectory->desired_transforms, *scenario.vcs,
                                    scenario.cfg.n);
    if (containment.worst_agent_a >= 0 &&
        containment.worst_agent_a < static_cast<int>(trajectory->agents.size()))
      containment.worst_agent_a = trajectory->agents[static_cast<size_t>(containment.worst_agent_a)];
  } else {
    containment.name = "containment simplex";
    containment.pass = true;
    containment.margin = 0.0;
    containment.detail = "no containment simplex configured";
  }
  report.conditions.push_back(containment);

  report.conditions.push_back(fragments[1]);
  (void)plan;
  return report;
}

Table2Outcome reproduce_table2() {
  Table2Outcome outcome;
  std::ostringstream out;
  out << std::setprecision(4) << std::fixed;
  bool ok = true;

  Scenario scenario = parse_scenario_text(builtin_table2_scenario());

  // Tabulated follower weights, two-decimal positions.
  WeightModel model = compute_weights(scenario.cfg, scenario.graph);
  const double sixth = 1.0 / 6.0;
  const std::map<int, std::vector<double>> expected = {
      {5, {0.5, sixth, sixth, sixth}},  {6, {0.5, sixth, sixth, sixth}},
      {7, {0.5, sixth, sixth, sixth}},  {8, {0.5, sixth, sixth, sixth}},
      {9, {0.2, 0.2, 0.2, 0.4}},        {10, {0.2, 0.2, 0.2, 0.4}},
      {11, {0.2, 0.2, 0.2, 0.4}},       {12, {0.2, 0.2, 0.2, 0.4}},
      {13, {0.2, 0.2, 0.2, 0.4}},       {14, {-0.5, 0.5, 0.5, 0.5}},
      {15, {0.5, -0.5, 0.5, 0.5}},      {16, {0.5, 0.5, -0.5, 0.5}},
  };
  double worst_weight_error = 0.0;
  for (const auto& [id, weights] : expected) {
    const std::vector<int>& neigh = scenario.graph.neighbors_of(id);
    for (size_t k = 0; k < neigh.size(); ++k) {
      const double got = model.real_weights.at(id).at(neigh[k]);
      worst_weight_error = std::max(worst_weight_error, std::abs(got - weights[k]));
    }
  }
  // The printed weight columns are display-rounded (0.2/0.4 and the exact
  // fractions), so the achievable agreement from the two-decimal positions is
  // bounded by that rounding, not by the position rounding alone.
  const bool weights_ok = worst_weight_error <= 0.05;
  ok = ok && weights_ok;
  out << (weights_ok ? "PASS" : "FAIL") << " tabulated weights reproduced (max error "
      << std::setprecision(5) << worst_weight_error
      << ", worst entry is the display-rounded 0.4 column)\n"
      << std::setprecision(4);

  SafetyParameters params = derive_safety(scenario);
  outcome.min_separation = params.min_separation;
  outcome.theta_u0 = params.theta_u0;
  outcome.psi_u0 = params.psi_u0;
  outcome.delta = params.delta;

  const bool sep_ok = std::abs(params.min_separation - 4.6607) <= 0.005 &&
                      ((params.closest_pair_a == 9 && params.closest_pair_b == 13) ||
                       (params.closest_pair_a == 13 && params.closest_pair_b == 9));
  ok = ok && sep_ok;
  out << (sep_ok ? "PASS" : "FAIL") << " min separation d_s=" << params.min_separation
      << " m (pair " << params.closest_pair_a << "," << params.closest_pair_b << ")\n";

  const bool angle_ok =
      std::abs(params.theta_u0 + 0.1721) <= 0.01 && std::abs(params.psi_u0 - 0.7130) <= 0.01;
  ok = ok && angle_ok;
  out << (angle_ok ? "PASS" : "FAIL") << " reference stretch angles theta_u0=" << params.theta_u0
      << " psi_u0=" << params.psi_u0 << " rad\n";

  out << "INFO deviation bound delta=" << params.delta
      << " m (cap delta_max=" << params.max_deviation_bound << " m)\n";

  Plan plan = build_plan(scenario);
  TeamTrajectory traj = run_simulation(scenario, plan);
  outcome.sup_deviation = traj.sup_deviation;
  outcome.min_desired_separation =
      *std::min_element(traj.min_desired_separation.begin(), traj.min_desired_separation.end());

  const bool dev_ok = traj.sup_deviation <= 0.67;
  ok = ok && dev_ok;
  out << (dev_ok ? "PASS" : "FAIL") << " sup deviation " << std::setprecision(6)
      << traj.sup_deviation << " m <= 0.67 m\n"
      << std::setprecision(4);

  const bool desired_ok = outcome.min_desired_separation >= 2.0 * params.epsilon;
  ok = ok && desired_ok;
  out << (desired_ok ? "PASS" : "FAIL") << " min desired pairwise distance "
      << outcome.min_desired_separation << " m >= " << 2.0 * params.epsilon << " m\n";

  SafetyReport report = run_certification(scenario, plan, &traj);
  ok = ok && report.all_pass();
  out << (report.all_pass() ? "PASS" : "FAIL") << " safety certificate\n";
  out << report.to_text();

  outcome.pass = ok;
  outcome.text = out.str();
  return outcome;
}

}  // namespace contdef
