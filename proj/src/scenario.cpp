#include "scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace contdef {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  raise(Errc::schema_error, path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path + "." + key, "missing field");
  return *it;
}

double number_at(const json& value, const std::string& path) {
  if (!value.is_number()) schema_fail(path, "expected a number");
  return value.get<double>();
}

Vec3 vec3_at(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) schema_fail(path, "expected [x, y, z]");
  return Vec3(number_at(value[0], path), number_at(value[1], path), number_at(value[2], path));
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Scenario parse_scenario_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(Errc::parse_error, e.what());
  }

  Scenario s;
  s.name = require(doc, "name", "$").get<std::string>();
  s.cfg.n = require(doc, "n", "$").get<int>();
  if (doc.contains("seed")) s.seed = doc["seed"].get<long>();

  const json& agents = require(doc, "agents", "$");
  if (!agents.is_array() || agents.empty()) schema_fail("$.agents", "expected a non-empty array");
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "$.agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    const int id = require(a, "id", path).get<int>();
    const std::string role = require(a, "role", path).get<std::string>();
    const Vec3 pos = vec3_at(require(a, "position", path), path + ".position");
    if (role == "leader") {
      s.cfg.leaders.push_back(id);
      s.cfg.positions[id] = pos;
    } else if (role == "follower") {
      s.cfg.followers.push_back(id);
      s.cfg.positions[id] = pos;
    } else if (role == "aux") {
      s.cfg.aux_positions[id] = pos;
    } else {
      schema_fail(path + ".role", "expected leader, follower or aux");
    }
  }

  if (doc.contains("initial_transform")) {
    const json& init = doc["initial_transform"];
    if (init.contains("rotation")) {
      const json& rows = init["rotation"];
      if (!rows.is_array() || rows.size() != 3)
        schema_fail("$.initial_transform.rotation", "expected three rows");
      for (int r = 0; r < 3; ++r) {
        const Vec3 row = vec3_at(rows[static_cast<size_t>(r)], "$.initial_transform.rotation");
        s.cfg.init_rotation.row(r) = row.transpose();
      }
    }
    if (init.contains("offset"))
      s.cfg.init_offset = vec3_at(init["offset"], "$.initial_transform.offset");
  }

  const json& graph = require(doc, "comm_graph", "$");
  if (!graph.is_object()) schema_fail("$.comm_graph", "expected an object keyed by agent id");
  for (const auto& [key, value] : graph.items()) {
    int id = 0;
    try {
      id = std::stoi(key);
    } catch (...) {
      schema_fail("$.comm_graph." + key, "keys must be integer agent ids");
    }
    if (!value.is_array()) schema_fail("$.comm_graph." + key, "expected a neighbor id array");
    std::vector<int> neighbors;
    for (const json& v : value) neighbors.push_back(v.get<int>());
    if (neighbors.size() != static_cast<size_t>(s.cfg.n) + 1)
      schema_fail("$.comm_graph." + key,
                  "agent " + key + " needs exactly " + std::to_string(s.cfg.n + 1) +
                      " in-neighbors");
    s.graph.in_neighbors[id] = neighbors;
  }

  if (doc.contains("vcs")) {
    VcsSimplex vcs;
    const json& verts = doc["vcs"];
    if (!verts.is_array() || verts.size() != static_cast<size_t>(s.cfg.n) + 1)
      schema_fail("$.vcs", "expected n+1 vertices");
    for (size_t i = 0; i < verts.size(); ++i)
      vcs.reference_vertices.push_back(vec3_at(verts[i], "$.vcs[" + std::to_string(i) + "]"));
    s.vcs = vcs;
  }

  if (doc.contains("obstacles")) {
    const json& boxes = doc["obstacles"];
    if (!boxes.is_array()) schema_fail("$.obstacles", "expected an array of boxes");
    for (size_t i = 0; i < boxes.size(); ++i) {
      const std::string path = "$.obstacles[" + std::to_string(i) + "]";
      ObstacleBox box;
      box.lo = vec3_at(require(boxes[i], "lo", path), path + ".lo");
      box.hi = vec3_at(require(boxes[i], "hi", path), path + ".hi");
      for (int a = 0; a < 3; ++a)
        if (box.lo(a) > box.hi(a)) schema_fail(path, "box corners are inverted");
      s.map.boxes.push_back(box);
    }
  }
  if (doc.contains("workspace")) {
    const json& ws = doc["workspace"];
    s.map.workspace_lo = vec3_at(require(ws, "lo", "$.workspace"), "$.workspace.lo");
    s.map.workspace_hi = vec3_at(require(ws, "hi", "$.workspace"), "$.workspace.hi");
  }
  if (doc.contains("grid_resolution"))
    s.map.resolution = number_at(doc["grid_resolution"], "$.grid_resolution");
  if (s.map.resolution <= 0.0) schema_fail("$.grid_resolution", "must be positive");

  const json& safety = require(doc, "safety", "$");
  s.safety.epsilon = number_at(require(safety, "epsilon", "$.safety"), "$.safety.epsilon");
  if (safety.contains("mode")) {
    s.safety.mode = safety["mode"].get<std::string>();
    if (s.safety.mode != "conservative" && s.safety.mode != "relaxed")
      schema_fail("$.safety.mode", "expected conservative or relaxed");
  }
  if (safety.contains("delta")) s.safety.delta = number_at(safety["delta"], "$.safety.delta");
  if (safety.contains("stretch_floor"))
    s.safety.stretch_floor = number_at(safety["stretch_floor"], "$.safety.stretch_floor");
  if (!s.safety.delta && !s.safety.stretch_floor)
    schema_fail("$.safety", "provide delta or stretch_floor");
  if (s.safety.delta && s.safety.stretch_floor)
    schema_fail("$.safety", "delta and stretch_floor are mutually exclusive");

  if (doc.contains("gains")) {
    const json& gains = doc["gains"];
    if (gains.contains("gamma")) {
      const json& g = gains["gamma"];
      if (!g.is_array() || g.size() != 4) schema_fail("$.gains.gamma", "expected four coefficients");
      for (int k = 0; k < 4; ++k)
        s.gains.gamma[static_cast<size_t>(k)] = number_at(g[static_cast<size_t>(k)], "$.gains.gamma");
    }
    if (gains.contains("feedback_depth")) {
      s.gains.feedback_depth = gains["feedback_depth"].get<int>();
      if (s.gains.feedback_depth < 1 || s.gains.feedback_depth > 4)
        schema_fail("$.gains.feedback_depth", "expected 1..4");
    }
    if (gains.contains("yaw_gain"))
      s.gains.vehicle.yaw_gain = number_at(gains["yaw_gain"], "$.gains.yaw_gain");
    if (gains.contains("yaw_rate_gain"))
      s.gains.vehicle.yaw_rate_gain = number_at(gains["yaw_rate_gain"], "$.gains.yaw_rate_gain");
  }
  if (!s.gains.stable()) schema_fail("$.gains.gamma", "characteristic polynomial is not stable");

  if (doc.contains("input_bounds")) {
    const json& b = doc["input_bounds"];
    if (b.contains("max_thrust_accel"))
      s.bounds.max_thrust_accel = number_at(b["max_thrust_accel"], "$.input_bounds.max_thrust_accel");
    if (b.contains("max_angle_accel"))
      s.bounds.max_angle_accel = number_at(b["max_angle_accel"], "$.input_bounds.max_angle_accel");
    if (b.contains("min_thrust")) s.bounds.min_thrust = number_at(b["min_thrust"], "$.input_bounds.min_thrust");
    if (b.contains("max_thrust")) s.bounds.max_thrust = number_at(b["max_thrust"], "$.input_bounds.max_thrust");
    if (b.contains("max_tilt")) s.bounds.max_tilt = number_at(b["max_tilt"], "$.input_bounds.max_tilt");
    if (b.contains("hard_fail")) s.bounds.hard_fail_on_saturation = b["hard_fail"].get<bool>();
  }

  if (doc.contains("plan")) {
    const json& plan = doc["plan"];
    PlanRequest request;
    const std::string mode = require(plan, "mode", "$.plan").get<std::string>();
    if (mode == "of") {
      request.mode = PlanMode::obstacle_free;
      const json& end = require(plan, "end_features", "$.plan");
      DeformationFeatures f;
      f.n = s.cfg.n;
      const json& stretch = require(end, "stretch", "$.plan.end_features");
      if (!stretch.is_array() || stretch.size() != 3)
        schema_fail("$.plan.end_features.stretch", "expected three stretches");
      f.lambda1 = number_at(stretch[0], "$.plan.end_features.stretch");
      f.lambda2 = number_at(stretch[1], "$.plan.end_features.stretch");
      f.lambda3 = number_at(stretch[2], "$.plan.end_features.stretch");
      const Vec3 rot = vec3_at(require(end, "rotation", "$.plan.end_features"),
                               "$.plan.end_features.rotation");
      f.phi_r = rot(0);
      f.theta_r = rot(1);
      f.psi_r = rot(2);
      f.d = vec3_at(require(end, "offset", "$.plan.end_features"), "$.plan.end_features.offset");
      request.end_features = f;
    } else if (mode == "ol") {
      request.mode = PlanMode::obstacle_laden;
      const json& goal = require(plan, "goal_vcs", "$.plan");
      if (!goal.is_array() || goal.size() != static_cast<size_t>(s.cfg.n) + 1)
        schema_fail("$.plan.goal_vcs", "expected n+1 vertices");
      for (size_t i = 0; i < goal.size(); ++i)
        request.goal_vcs.push_back(vec3_at(goal[i], "$.plan.goal_vcs[" + std::to_string(i) + "]"));
    } else {
      schema_fail("$.plan.mode", "expected of or ol");
    }
    if (plan.contains("duration")) {
      request.duration = number_at(plan["duration"], "$.plan.duration");
      if (*request.duration <= 0.0) schema_fail("$.plan.duration", "must be positive");
    }
    s.plan_request = request;
  }

  if (doc.contains("timing")) {
    const json& t = doc["timing"];
    if (t.contains("dt")) s.timing.dt = number_at(t["dt"], "$.timing.dt");
    if (t.contains("min_segment_time"))
      s.timing.min_segment_time = number_at(t["min_segment_time"], "$.timing.min_segment_time");
    if (t.contains("max_segment_time"))
      s.timing.max_segment_time = number_at(t["max_segment_time"], "$.timing.max_segment_time");
    if (t.contains("output_stride")) s.timing.output_stride = t["output_stride"].get<int>();
    if (s.timing.dt <= 0.0) schema_fail("$.timing.dt", "must be positive");
    if (s.timing.output_stride < 1) schema_fail("$.timing.output_stride", "must be at least 1");
  }

  try {
    s.cfg.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::schema_error || e.code() == Errc::degenerate_simplex)
      raise(Errc::schema_error, std::string("$.agents: ") + e.what());
    throw;
  }
  // Structural graph coverage: every non-leader must appear.
  for (int id : s.cfg.followers)
    if (!s.graph.in_neighbors.count(id))
      schema_fail("$.comm_graph", "follower " + std::to_string(id) + " has no in-neighbor list");
  for (const auto& [id, pos] : s.cfg.aux_positions) {
    (void)pos;
    if (!s.graph.in_neighbors.count(id))
      schema_fail("$.comm_graph", "aux node " + std::to_string(id) + " has no in-neighbor list");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["n"] = s.cfg.n;
  doc["seed"] = s.seed;
  json agents = json::array();
  for (int id : s.cfg.leaders)
    agents.push_back({{"id", id}, {"role", "leader"}, {"position", vec3_to_json(s.cfg.positions.at(id))}});
  for (int id : s.cfg.followers)
    agents.push_back({{"id", id}, {"role", "follower"}, {"position", vec3_to_json(s.cfg.positions.at(id))}});
  for (const auto& [id, pos] : s.cfg.aux_positions)
    agents.push_back({{"id", id}, {"role", "aux"}, {"position", vec3_to_json(pos)}});
  doc["agents"] = agents;
  json graph = json::object();
  for (const auto& [id, neigh] : s.graph.in_neighbors) graph[std::to_string(id)] = neigh;
  doc["comm_graph"] = graph;
  doc["initial_transform"] = {
      {"rotation", json::array({vec3_to_json(s.cfg.init_rotation.row(0)),
                                vec3_to_json(s.cfg.init_rotation.row(1)),
                                vec3_to_json(s.cfg.init_rotation.row(2))})},
      {"offset", vec3_to_json(s.cfg.init_offset)}};
  if (s.vcs) {
    json verts = json::array();
    for (const Vec3& v : s.vcs->reference_vertices) verts.push_back(vec3_to_json(v));
    doc["vcs"] = verts;
  }
  if (!s.map.boxes.empty()) {
    json boxes = json::array();
    for (const ObstacleBox& b : s.map.boxes)
      boxes.push_back({{"lo", vec3_to_json(b.lo)}, {"hi", vec3_to_json(b.hi)}});
    doc["obstacles"] = boxes;
  }
  doc["workspace"] = {{"lo", vec3_to_json(s.map.workspace_lo)},
                      {"hi", vec3_to_json(s.map.workspace_hi)}};
  doc["grid_resolution"] = s.map.resolution;
  json safety = {{"epsilon", s.safety.epsilon}, {"mode", s.safety.mode}};
  if (s.safety.delta) safety["delta"] = *s.safety.delta;
  if (s.safety.stretch_floor) safety["stretch_floor"] = *s.safety.stretch_floor;
  doc["safety"] = safety;
  doc["gains"] = {{"gamma", s.gains.gamma},
                  {"feedback_depth", s.gains.feedback_depth},
                  {"yaw_gain", s.gains.vehicle.yaw_gain},
                  {"yaw_rate_gain", s.gains.vehicle.yaw_rate_gain}};
  doc["input_bounds"] = {{"max_thrust_accel", s.bounds.max_thrust_accel},
                         {"max_angle_accel", s.bounds.max_angle_accel},
                         {"min_thrust", s.bounds.min_thrust},
                         {"max_thrust", s.bounds.max_thrust},
                         {"max_tilt", s.bounds.max_tilt},
                         {"hard_fail", s.bounds.hard_fail_on_saturation}};
  if (s.plan_request) {
    json plan;
    if (s.plan_request->mode == PlanMode::obstacle_free) {
      plan["mode"] = "of";
      const DeformationFeatures& f = *s.plan_request->end_features;
      plan["end_features"] = {
          {"stretch", json::array({f.lambda1, f.lambda2, f.lambda3})},
          {"rotation", json::array({f.phi_r, f.theta_r, f.psi_r})},
          {"offset", vec3_to_json(f.d)}};
    } else {
      plan["mode"] = "ol";
      json goal = json::array();
      for (const Vec3& v : s.plan_request->goal_vcs) goal.push_back(vec3_to_json(v));
      plan["goal_vcs"] = goal;
    }
    if (s.plan_request->duration) plan["duration"] = *s.plan_request->duration;
    doc["plan"] = plan;
  }
  doc["timing"] = {{"dt", s.timing.dt},
                   {"min_segment_time", s.timing.min_segment_time},
                   {"max_segment_time", s.timing.max_segment_time},
                   {"output_stride", s.timing.output_stride}};
  return doc.dump(2);
}

std::string serialize_plan(const Plan& plan) {
  json doc;
  doc["mode"] = plan.mode == PlanMode::obstacle_free ? "of" : "ol";
  doc["n"] = plan.n;
  json waypoints = json::array();
  for (const Eigen::VectorXd& w : plan.waypoints) {
    json row = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) row.push_back(w(i));
    waypoints.push_back(row);
  }
  doc["waypoints"] = waypoints;
  doc["durations"] = plan.durations;
  doc["stretch_angles"] = {{"theta_u", plan.stretch_theta_u}, {"psi_u", plan.stretch_psi_u}};
  if (!plan.vcs_reference.empty()) {
    json verts = json::array();
    for (const Vec3& v : plan.vcs_reference) verts.push_back(vec3_to_json(v));
    doc["vcs_reference"] = verts;
  }
  return doc.dump(2);
}

Plan parse_plan_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(Errc::parse_error, e.what());
  }
  Plan plan;
  const std::string mode = require(doc, "mode", "$").get<std::string>();
  if (mode == "of")
    plan.mode = PlanMode::obstacle_free;
  else if (mode == "ol")
    plan.mode = PlanMode::obstacle_laden;
  else
    schema_fail("$.mode", "expected of or ol");
  plan.n = require(doc, "n", "$").get<int>();
  for (const json& row : require(doc, "waypoints", "$")) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(row.size()));
    for (size_t i = 0; i < row.size(); ++i)
      w(static_cast<Eigen::Index>(i)) = number_at(row[i], "$.waypoints");
    plan.waypoints.push_back(w);
  }
  for (const json& d : require(doc, "durations", "$"))
    plan.durations.push_back(number_at(d, "$.durations"));
  if (doc.contains("stretch_angles")) {
    plan.stretch_theta_u = number_at(require(doc["stretch_angles"], "theta_u", "$.stretch_angles"),
                                     "$.stretch_angles.theta_u");
    plan.stretch_psi_u = number_at(require(doc["stretch_angles"], "psi_u", "$.stretch_angles"),
                                   "$.stretch_angles.psi_u");
  }
  if (doc.contains("vcs_reference"))
    for (size_t i = 0; i < doc["vcs_reference"].size(); ++i)
      plan.vcs_reference.push_back(
          vec3_at(doc["vcs_reference"][i], "$.vcs_reference[" + std::to_string(i) + "]"));
  return plan;
}

Plan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plan_text(buffer.str());
}

std::string trajectory_csv(const TeamTrajectory& trajectory) {
  std::ostringstream out;
  out << "time,agent,x,y,z,x_ht,y_ht,z_ht,deviation,u_T,u_phi,u_theta\n";
  for (const TrajectoryRow& row : trajectory.rows) {
    out << format_double(row.time) << ',' << row.agent << ',' << format_double(row.position.x())
        << ',' << format_double(row.position.y()) << ',' << format_double(row.position.z()) << ','
        << format_double(row.desired.x()) << ',' << format_double(row.desired.y()) << ','
        << format_double(row.desired.z()) << ',' << format_double(row.deviation) << ','
        << format_double(row.input.thrust_accel) << ',' << format_double(row.input.roll_accel)
        << ',' << format_double(row.input.pitch_accel) << '\n';
  }
  return out.str();
}

std::string features_csv(const PlanSamples& samples) {
  std::ostringstream out;
  out << "time,lambda1,lambda2,lambda3,phi_u,theta_u,psi_u,phi_r,theta_r,psi_r,d1,d2,d3\n";
  for (size_t k = 0; k < samples.times.size(); ++k) {
    const DeformationFeatures& f = samples.features[k];
    out << format_double(samples.times[k]) << ',' << format_double(f.lambda1) << ','
        << format_double(f.lambda2) << ',' << format_double(f.lambda3) << ','
        << format_double(f.phi_u) << ',' << format_double(f.theta_u) << ','
        << format_double(f.psi_u) << ',' << format_double(f.phi_r) << ','
        << format_double(f.theta_r) << ',' << format_double(f.psi_r) << ','
        << format_double(f.d.x()) << ',' << format_double(f.d.y()) << ','
        << format_double(f.d.z()) << '\n';
  }
  return out.str();
}

PlanSamples decompose_leader_table(const ReferenceConfiguration& cfg,
                                   const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  PlanSamples out;
  const size_t leaders = cfg.leaders.size();
  std::vector<Vec3> refs = cfg.leader_positions();
  bool first = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (first && line.find_first_not_of("0123456789+-. \t,eE") != std::string::npos) {
      first = false;
      continue;  // header row
    }
    first = false;
    std::vector<double> values;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (...) {
        raise(Errc::parse_error, "line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
    if (values.size() != 1 + 3 * leaders)
      raise(Errc::parse_error, "line " + std::to_string(line_no) + ": expected time plus " +
                                   std::to_string(3 * leaders) + " leader coordinates");
    std::vector<Vec3> now(leaders);
    for (size_t l = 0; l < leaders; ++l)
      now[l] = Vec3(values[1 + 3 * l], values[2 + 3 * l], values[3 + 3 * l]);
    Decomposition dec = decompose(cfg.n, refs, now);
    out.times.push_back(values[0]);
    out.transforms.push_back(dec.transform);
    out.features.push_back(dec.features);
  }
  if (out.times.empty()) raise(Errc::parse_error, "no data rows in the leader table");
  return out;
}

}  // namespace contdef
