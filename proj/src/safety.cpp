#include "safety.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geometry.hpp"

namespace contdef {

double SafetyParameters::relaxed_stretch_floor() const {
  return 2.0 * (delta + epsilon) / min_separation;
}

double SafetyParameters::conservative_stretch_floor() const {
  return (delta + epsilon) / (max_deviation_bound + epsilon);
}

double SafetyParameters::deviation_for_stretch_floor(double stretch_floor) const {
  return stretch_floor * (max_deviation_bound + epsilon) - epsilon;
}

bool SafetyReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionReport& c) { return c.pass; });
}

std::string SafetyReport::to_text() const {
  std::ostringstream out;
  out << "safety mode: " << mode << "\n";
  for (const ConditionReport& c : conditions) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << "  margin=" << c.margin;
    if (c.worst_agent_a >= 0) {
      out << "  worst at t=" << c.worst_time << " agent " << c.worst_agent_a;
      if (c.worst_agent_b >= 0) out << "/" << c.worst_agent_b;
    }
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  return out.str();
}

namespace {

Vec3 sign_normalized(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > 1e-12) return v(i) > 0 ? v : Vec3(-v);
  }
  return v;
}

double distance_to_simplex_boundary(const Vec3& p, const std::vector<Vec3>& vertices, int n) {
  if (n == 1) return std::min((p - vertices[0]).norm(), (p - vertices[1]).norm());
  if (n == 2) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
      best = std::min(best, point_segment_distance(p, vertices[i], vertices[(i + 1) % 3]));
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Vec3, 3> face;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) face[static_cast<size_t>(k++)] = vertices[static_cast<size_t>(i)];
    best = std::min(best, point_triangle_distance(p, face[0], face[1], face[2]));
  }
  return best;
}

}  // namespace

SafetyParameters reference_metrics(const ReferenceConfiguration& cfg,
                                   const std::optional<VcsSimplex>& vcs, double epsilon) {
  if (epsilon <= 0.0) raise(Errc::schema_error, "vehicle radius must be positive");

  SafetyParameters out;
  out.epsilon = epsilon;

  std::vector<std::pair<int, Vec3>> agents(cfg.positions.begin(), cfg.positions.end());
  out.min_separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < agents.size(); ++i) {
    for (size_t j = i + 1; j < agents.size(); ++j) {
      const double dist = (agents[i].second - agents[j].second).norm();
      if (dist < out.min_separation) {
        out.min_separation = dist;
        out.closest_pair_a = agents[i].first;
        out.closest_pair_b = agents[j].first;
        out.min_separation_direction =
            sign_normalized((agents[j].second - agents[i].second).normalized());
      }
    }
  }
  if (out.min_separation <= 2.0 * epsilon)
    raise(Errc::too_dense, "no feasible deviation bound: closest pair " +
                               std::to_string(out.closest_pair_a) + "/" +
                               std::to_string(out.closest_pair_b) + " at " +
                               std::to_string(out.min_separation) + " m");

  if (vcs) {
    if (static_cast<int>(vcs->reference_vertices.size()) != cfg.n + 1)
      raise(Errc::schema_error, "containment simplex needs n+1 vertices");
    if (simplex_rank(vcs->reference_vertices) != cfg.n)
      raise(Errc::degenerate_simplex, "containment simplex is degenerate");
    out.boundary_clearance = std::numeric_limits<double>::infinity();
    for (const auto& [id, p] : cfg.positions) {
      (void)id;
      out.boundary_clearance =
          std::min(out.boundary_clearance,
                   distance_to_simplex_boundary(p, vcs->reference_vertices, cfg.n));
    }
  }

  out.max_deviation_bound = 0.5 * (out.min_separation - 2.0 * epsilon);
  if (vcs)
    out.max_deviation_bound =
        std::min(out.max_deviation_bound, out.boundary_clearance - epsilon);

  const Vec3& u = out.min_separation_direction;
  out.theta_u0 = -std::asin(std::max(-1.0, std::min(1.0, u.z())));
  out.psi_u0 = std::atan2(u.y(), u.x());
  return out;
}

ConditionReport check_conservative(const std::vector<DeformationFeatures>& features,
                                   const std::vector<double>& times,
                                   const SafetyParameters& params) {
  ConditionReport rep;
  rep.name = "conservative stretch floor";
  const double floor = params.conservative_stretch_floor();
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < features.size(); ++k) {
    const double lambda = features[k].min_in_scope_stretch();
    if (lambda < worst) {
      worst = lambda;
      rep.worst_time = times[k];
    }
  }
  rep.margin = worst - floor;
  // Plans may ride exactly on the floor; keep equality within roundoff passing.
  rep.pass = rep.margin >= -1e-9;
  rep.detail = "min stretch " + std::to_string(worst) + " vs floor " + std::to_string(floor);
  return rep;
}

ConditionReport check_relaxed(const std::vector<HomogeneousTransform>& transforms,
                              const std::vector<double>& times,
                              const SafetyParameters& params) {
  ConditionReport rep;
  rep.name = "relaxed stretch floor";
  const double floor = params.relaxed_stretch_floor();

  // Reference stretch directions: the pinned closest-pair direction plus an
  // orthonormal completion (the roll-like angle about the pinned axis is
  // arbitrary and taken as zero).
  const Mat3 basis = rotation_matrix(0.0, params.theta_u0, params.psi_u0);

  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < transforms.size(); ++k) {
    const PolarFactors polar = polar_decompose(transforms[k].q);
    // Constant deformation angles mean the stretch is diagonal in the
    // reference eigenbasis at every time.
    const Mat3 in_basis = basis * polar.stretch * basis.transpose();
    double off_diag = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        if (r != c) off_diag = std::max(off_diag, std::abs(in_basis(r, c)));
    if (off_diag > 1e-9 * polar.stretch.norm())
      raise(Errc::angles_not_constant,
            "deformation angles drift at t=" + std::to_string(times[k]) +
                "; use the conservative check");
    if (in_basis(1, 1) <= 0.0 || in_basis(2, 2) <= 0.0)
      raise(Errc::not_positive_definite, "secondary stretches must stay positive");
    const double lambda1 = in_basis(0, 0);
    if (lambda1 < worst) {
      worst = lambda1;
      rep.worst_time = times[k];
    }
  }
  rep.margin = worst - floor;
  rep.pass = rep.margin >= -1e-9;
  rep.detail =
      "min pinned stretch " + std::to_string(worst) + " vs floor " + std::to_string(floor);
  return rep;
}

ConditionReport check_containment(const std::vector<double>& times,
                                  const std::vector<std::vector<Vec3>>& agent_positions,
                                  const std::vector<HomogeneousTransform>& transforms,
                                  const VcsSimplex& vcs, int n) {
  ConditionReport rep;
  rep.name = "containment simplex";
  rep.margin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < times.size(); ++k) {
    std::vector<Vec3> vertices(vcs.reference_vertices.size());
    for (size_t v = 0; v < vertices.size(); ++v)
      vertices[v] = transforms[k].apply(vcs.reference_vertices[v]);
    for (size_t i = 0; i < agent_positions[k].size(); ++i) {
      // Vehicles fly slightly out of plane for n < 3; containment is the
      // in-plane notion (the normal deviation is bounded by condition 1).
      Eigen::VectorXd theta = barycentric_projected(vertices, agent_positions[k][i], n);
      const double smallest = theta.minCoeff();
      if (smallest < rep.margin) {
        rep.margin = smallest;
        rep.worst_time = times[k];
        rep.worst_agent_a = static_cast<int>(i);
      }
    }
  }
  rep.pass = rep.margin > 0.0;
  rep.detail = "smallest barycentric coordinate w.r.t. the containment simplex";
  return rep;
}

std::vector<ConditionReport> check_deviation_and_inputs(const TeamTrajectory& trajectory,
                                                        const SafetyParameters& params,
                                                        const InputBounds& bounds) {
  std::vector<ConditionReport> out;

  ConditionReport dev;
  dev.name = "bounded deviation";
  dev.margin = params.delta - trajectory.sup_deviation;
  dev.pass = dev.margin >= 0.0;
  dev.worst_time = trajectory.sup_deviation_time;
  dev.worst_agent_a = trajectory.sup_deviation_agent;
  dev.detail = "sup deviation " + std::to_string(trajectory.sup_deviation) + " vs delta " +
               std::to_string(params.delta);
  out.push_back(dev);

  ConditionReport inp;
  inp.name = "input feasibility";
  const double thrust_margin = bounds.max_thrust_accel - trajectory.max_thrust_accel;
  const double roll_margin = bounds.max_angle_accel - trajectory.max_roll_accel;
  const double pitch_margin = bounds.max_angle_accel - trajectory.max_pitch_accel;
  inp.margin = std::min({thrust_margin, roll_margin, pitch_margin});
  inp.pass = inp.margin >= 0.0 && trajectory.saturated_steps == 0;
  inp.detail = "peak |u_T| " + std::to_string(trajectory.max_thrust_accel) + ", |u_phi| " +
               std::to_string(trajectory.max_roll_accel) + ", |u_theta| " +
               std::to_string(trajectory.max_pitch_accel) +
               (trajectory.saturated_steps ? ", clipped steps " +
                                                 std::to_string(trajectory.saturated_steps)
                                           : "");
  out.push_back(inp);
  return out;
}

ConditionReport check_pairwise_desired(const ReferenceConfiguration& cfg,
                                       const std::vector<double>& times,
                                       const std::vector<HomogeneousTransform>& transforms,
                                       const SafetyParameters& params) {
  ConditionReport rep;
  rep.name = "pairwise desired separation";
  const double required = 2.0 * (params.delta + params.epsilon);
  std::vector<std::pair<int, Vec3>> agents(cfg.positions.begin(), cfg.positions.end());
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < transforms.size(); ++k) {
    for (size_t i = 0; i < agents.size(); ++i) {
      const Vec3 pi = transforms[k].apply(agents[i].second);
      for (size_t j = i + 1; j < agents.size(); ++j) {
        const double dist = (pi - transforms[k].apply(agents[j].second)).norm();
        if (dist < worst) {
          worst = dist;
          rep.worst_time = times[k];
          rep.worst_agent_a = agents[i].first;
          rep.worst_agent_b = agents[j].first;
        }
      }
    }
  }
  rep.margin = worst - required;
  rep.pass = rep.margin >= 0.0;
  rep.detail = "min desired distance " + std::to_string(worst) + " vs 2(delta+eps) " +
               std::to_string(required);
  return rep;
}

}  // namespace contdef
