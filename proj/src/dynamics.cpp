#include "dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "geometry.hpp"

namespace contdef {

bool GainSet::stable() const {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion.block<3, 3>(0, 1).setIdentity();
  for (int k = 0; k < 4; ++k) companion(3, 3 - k) = -gamma[static_cast<size_t>(k)];
  Eigen::EigenSolver<Eigen::Matrix4d> eig(companion, false);
  return eig.eigenvalues().real().maxCoeff() < 0.0;
}

Vec3 thrust_direction(double roll, double pitch, double yaw) {
  const double cph = std::cos(roll), sph = std::sin(roll);
  const double cth = std::cos(pitch), sth = std::sin(pitch);
  const double cps = std::cos(yaw), sps = std::sin(yaw);
  return {cph * sth * cps + sph * sps, cph * sth * sps - sph * cps, cph * cth};
}

Vec3 thrust_direction_d_roll(double roll, double pitch, double yaw) {
  const double cph = std::cos(roll), sph = std::sin(roll);
  const double cth = std::cos(pitch), sth = std::sin(pitch);
  const double cps = std::cos(yaw), sps = std::sin(yaw);
  return {-sph * sth * cps + cph * sps, -sph * sth * sps - cph * cps, -sph * cth};
}

Vec3 thrust_direction_d_pitch(double roll, double pitch, double yaw) {
  const double cph = std::cos(roll);
  const double cth = std::cos(pitch), sth = std::sin(pitch);
  const double cps = std::cos(yaw), sps = std::sin(yaw);
  return {cph * cth * cps, cph * cth * sps, -cph * sth};
}

Vec3 thrust_direction_d_yaw(double roll, double pitch, double yaw) {
  const double cph = std::cos(roll), sph = std::sin(roll);
  const double sth = std::sin(pitch);
  const double cps = std::cos(yaw), sps = std::sin(yaw);
  return {-cph * sth * sps + sph * cps, cph * sth * cps + sph * sps, 0.0};
}

namespace {

// Second partials of the thrust direction, needed for the exact snap map.
Vec3 dir_d2(const QuadState& s, int p, int q) {
  const double cph = std::cos(s.roll), sph = std::sin(s.roll);
  const double cth = std::cos(s.pitch), sth = std::sin(s.pitch);
  const double cps = std::cos(s.yaw), sps = std::sin(s.yaw);
  if (p > q) std::swap(p, q);
  if (p == 0 && q == 0)  // roll, roll
    return {-cph * sth * cps - sph * sps, -cph * sth * sps + sph * cps, -cph * cth};
  if (p == 0 && q == 1)  // roll, pitch
    return {-sph * cth * cps, -sph * cth * sps, sph * sth};
  if (p == 0 && q == 2)  // roll, yaw
    return {sph * sth * sps + cph * cps, -sph * sth * cps + cph * sps, 0.0};
  if (p == 1 && q == 1)  // pitch, pitch
    return {-cph * sth * cps, -cph * sth * sps, -cph * cth};
  if (p == 1 && q == 2)  // pitch, yaw
    return {-cph * cth * sps, cph * cth * cps, 0.0};
  // yaw, yaw
  return {-cph * sth * cps - sph * sps, -cph * sth * sps + sph * cps, 0.0};
}

double yaw_accel(const QuadState& s, const VehicleParams& p) {
  // Internal dynamics regulating yaw to zero.
  return -p.yaw_gain * s.yaw - p.yaw_rate_gain * s.yaw_rate;
}

QuadState scaled_sum(const QuadState& a, double ha, const QuadState& b, double hb) {
  QuadState r;
  r.position = ha * a.position + hb * b.position;
  r.velocity = ha * a.velocity + hb * b.velocity;
  r.thrust = ha * a.thrust + hb * b.thrust;
  r.roll = ha * a.roll + hb * b.roll;
  r.pitch = ha * a.pitch + hb * b.pitch;
  r.yaw = ha * a.yaw + hb * b.yaw;
  r.thrust_rate = ha * a.thrust_rate + hb * b.thrust_rate;
  r.roll_rate = ha * a.roll_rate + hb * b.roll_rate;
  r.pitch_rate = ha * a.pitch_rate + hb * b.pitch_rate;
  r.yaw_rate = ha * a.yaw_rate + hb * b.yaw_rate;
  return r;
}

QuadState rk4_step(const QuadState& state, const ControlInput& input,
                   const VehicleParams& params, double dt) {
  QuadState k1 = quad_derivative(state, input, params);
  QuadState k2 = quad_derivative(scaled_sum(state, 1.0, k1, 0.5 * dt), input, params);
  QuadState k3 = quad_derivative(scaled_sum(state, 1.0, k2, 0.5 * dt), input, params);
  QuadState k4 = quad_derivative(scaled_sum(state, 1.0, k3, dt), input, params);
  QuadState sum = scaled_sum(k1, 1.0, k2, 2.0);
  sum = scaled_sum(sum, 1.0, k3, 2.0);
  sum = scaled_sum(sum, 1.0, k4, 1.0);
  return scaled_sum(state, 1.0, sum, dt / 6.0);
}

}  // namespace

QuadState quad_derivative(const QuadState& state, const ControlInput& input,
                          const VehicleParams& params) {
  QuadState d;
  d.position = state.velocity;
  d.velocity = Vec3(0.0, 0.0, -params.gravity) +
               state.thrust * thrust_direction(state.roll, state.pitch, state.yaw);
  d.thrust = state.thrust_rate;
  d.roll = state.roll_rate;
  d.pitch = state.pitch_rate;
  d.yaw = state.yaw_rate;
  d.thrust_rate = input.thrust_accel;
  d.roll_rate = input.roll_accel;
  d.pitch_rate = input.pitch_accel;
  d.yaw_rate = yaw_accel(state, params);
  return d;
}

Vec3 acceleration_of(const QuadState& s, const VehicleParams& p) {
  return Vec3(0.0, 0.0, -p.gravity) + s.thrust * thrust_direction(s.roll, s.pitch, s.yaw);
}

Vec3 jerk_of(const QuadState& s) {
  const Vec3 dir = thrust_direction(s.roll, s.pitch, s.yaw);
  const Vec3 dir_dot = thrust_direction_d_roll(s.roll, s.pitch, s.yaw) * s.roll_rate +
                       thrust_direction_d_pitch(s.roll, s.pitch, s.yaw) * s.pitch_rate +
                       thrust_direction_d_yaw(s.roll, s.pitch, s.yaw) * s.yaw_rate;
  return s.thrust_rate * dir + s.thrust * dir_dot;
}

ControlInput feedback_linearize(const QuadState& s, const Vec3& desired_snap,
                                const VehicleParams& params) {
  const Vec3 dir = thrust_direction(s.roll, s.pitch, s.yaw);
  const Vec3 d_roll = thrust_direction_d_roll(s.roll, s.pitch, s.yaw);
  const Vec3 d_pitch = thrust_direction_d_pitch(s.roll, s.pitch, s.yaw);
  const Vec3 d_yaw = thrust_direction_d_yaw(s.roll, s.pitch, s.yaw);

  const Vec3 rates(s.roll_rate, s.pitch_rate, s.yaw_rate);
  const Vec3 dir_dot = d_roll * rates(0) + d_pitch * rates(1) + d_yaw * rates(2);

  // Snap = u_T * dir + thrust * (d_roll u_phi + d_pitch u_theta) + drift,
  // where drift collects the rate-quadratic terms and the yaw loop.
  Vec3 quad_terms = Vec3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) quad_terms += dir_d2(s, p, q) * rates(p) * rates(q);
  const Vec3 drift =
      2.0 * s.thrust_rate * dir_dot + s.thrust * (quad_terms + d_yaw * yaw_accel(s, params));

  Mat3 m;
  m.col(0) = dir;
  m.col(1) = s.thrust * d_roll;
  m.col(2) = s.thrust * d_pitch;
  if (std::abs(m.determinant()) < 1e-9)
    raise(Errc::singular_linearization, "thrust/attitude configuration is singular");
  const Vec3 u = m.partialPivLu().solve(desired_snap - drift);
  return {u(0), u(1), u(2)};
}

Vec3 control_law(const std::array<Vec3, 4>& own, const std::array<Vec3, 5>& reference,
                 const GainSet& gains) {
  const int rho = 4;
  const int depth = gains.feedback_depth;
  Vec3 v = Vec3::Zero();
  for (int k = 1; k <= rho - depth - 1; ++k)
    v -= gains.gamma[static_cast<size_t>(k - 1)] * own[static_cast<size_t>(rho - k)];
  for (int k = std::max(rho - depth, 1); k <= rho; ++k)
    v += gains.gamma[static_cast<size_t>(k - 1)] *
         (reference[static_cast<size_t>(rho - k)] - own[static_cast<size_t>(rho - k)]);
  if (depth == rho) v += reference[4];  // order-rho feedforward
  return v;
}

LeaderMotion stationary_motion(const ReferenceConfiguration& cfg) {
  std::vector<Vec3> initial;
  for (int id : cfg.leaders)
    initial.push_back(cfg.init_rotation * cfg.positions.at(id) + cfg.init_offset);
  return [initial](int ordinal, double) {
    std::array<Vec3, 5> out;
    out.fill(Vec3::Zero());
    out[0] = initial[static_cast<size_t>(ordinal)];
    return out;
  };
}

int TeamTrajectory::agent_index(int id) const {
  auto it = std::find(agents.begin(), agents.end(), id);
  if (it == agents.end()) raise(Errc::schema_error, "agent not in trajectory");
  return static_cast<int>(it - agents.begin());
}

TeamTrajectory simulate_team(const ReferenceConfiguration& cfg, const WeightModel& model,
                             const LeaderMotion& leader_motion, const GainSet& gains,
                             const SimOptions& options) {
  if (options.dt <= 0.0) raise(Errc::schema_error, "time step must be positive");
  if (!gains.stable()) raise(Errc::schema_error, "gain polynomial is not stable");

  const int nl = static_cast<int>(model.leaders.size());
  const int nf = static_cast<int>(model.followers.size());
  const int na = nl + nf;
  const VehicleParams& veh = gains.vehicle;
  const InputBounds& bounds = options.bounds;

  TeamTrajectory traj;
  traj.dt = options.dt;
  traj.agents = model.leaders;
  traj.agents.insert(traj.agents.end(), model.followers.begin(), model.followers.end());

  std::vector<Vec3> ref_positions(na);
  for (int i = 0; i < na; ++i) ref_positions[i] = cfg.positions.at(traj.agents[i]);

  std::vector<QuadState> states(na);
  std::vector<Vec3> commanded_snap(na, Vec3::Zero());
  for (int i = 0; i < na; ++i)
    states[i].position = cfg.init_rotation * ref_positions[i] + cfg.init_offset;

  // Real in-neighbor weights resolved to agent indices.
  std::vector<std::vector<std::pair<int, double>>> follower_weights(nf);
  for (int f = 0; f < nf; ++f)
    for (const auto& [j, w] : model.real_weights.at(model.followers[f]))
      follower_weights[f].emplace_back(traj.agent_index(j), w);

  const int steps = static_cast<int>(std::llround(options.duration / options.dt));
  const size_t samples = static_cast<size_t>(steps) + 1;
  traj.times.resize(samples);
  traj.deviations.resize(samples * na);
  traj.positions.resize(samples * na);
  traj.desired_transforms.resize(samples);
  traj.features.resize(samples);
  traj.min_desired_separation.resize(samples);

  std::vector<Vec3> leader_plan_pos(nl);
  std::vector<ControlInput> inputs(na);
  std::vector<Vec3> snaps(na);

  auto clamp_channel = [&](double value, double limit, bool& clipped) {
    if (std::abs(value) <= limit) return value;
    clipped = true;
    return std::copysign(limit, value);
  };

  for (int step = 0; step <= steps; ++step) {
    const double t = step * options.dt;

    std::vector<std::array<Vec3, 5>> leader_refs(nl);
    for (int l = 0; l < nl; ++l) {
      leader_refs[l] = leader_motion(l, t);
      leader_plan_pos[l] = leader_refs[l][0];
    }

    // Desired transform for this instant, from the leader plan.
    Decomposition dec = decompose(cfg.n, std::span<const Vec3>(ref_positions.data(), nl),
                                  std::span<const Vec3>(leader_plan_pos.data(), nl));
    traj.times[step] = t;
    traj.desired_transforms[step] = dec.transform;
    traj.features[step] = dec.features;

    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < na; ++i) {
      const Vec3 di = dec.transform.apply(ref_positions[i]);
      for (int j = i + 1; j < na; ++j)
        min_sep = std::min(min_sep, (di - dec.transform.apply(ref_positions[j])).norm());
    }
    traj.min_desired_separation[step] = min_sep;

    for (int i = 0; i < na; ++i) {
      const Vec3 desired = dec.transform.apply(ref_positions[i]);
      const double deviation = (states[i].position - desired).norm();
      traj.positions[static_cast<size_t>(step) * na + i] = states[i].position;
      traj.deviations[static_cast<size_t>(step) * na + i] = deviation;
      if (deviation > traj.sup_deviation) {
        traj.sup_deviation = deviation;
        traj.sup_deviation_time = t;
        traj.sup_deviation_agent = traj.agents[i];
      }
    }

    // Controls from the step-start snapshot.
    for (int i = 0; i < na; ++i) {
      std::array<Vec3, 5> reference;
      if (i < nl) {
        reference = leader_refs[i];
      } else {
        reference.fill(Vec3::Zero());
        for (const auto& [j, w] : follower_weights[i - nl]) {
          reference[0] += w * states[j].position;
          reference[1] += w * states[j].velocity;
          reference[2] += w * acceleration_of(states[j], veh);
          reference[3] += w * jerk_of(states[j]);
          reference[4] += w * commanded_snap[j];  // neighbors' last commands
        }
      }
      const std::array<Vec3, 4> own = {states[i].position, states[i].velocity,
                                       acceleration_of(states[i], veh), jerk_of(states[i])};
      snaps[i] = control_law(own, reference, gains);

      ControlInput u = feedback_linearize(states[i], snaps[i], veh);
      bool clipped = false;
      u.thrust_accel = clamp_channel(u.thrust_accel, bounds.max_thrust_accel, clipped);
      u.roll_accel = clamp_channel(u.roll_accel, bounds.max_angle_accel, clipped);
      u.pitch_accel = clamp_channel(u.pitch_accel, bounds.max_angle_accel, clipped);
      if (clipped) {
        ++traj.saturated_steps;
        if (bounds.hard_fail_on_saturation)
          raise(Errc::input_saturated, "input limit reached by agent " +
                                           std::to_string(traj.agents[i]) + " at t=" +
                                           std::to_string(t));
      }
      inputs[i] = u;
      traj.max_thrust_accel = std::max(traj.max_thrust_accel, std::abs(u.thrust_accel));
      traj.max_roll_accel = std::max(traj.max_roll_accel, std::abs(u.roll_accel));
      traj.max_pitch_accel = std::max(traj.max_pitch_accel, std::abs(u.pitch_accel));
    }

    if (step % options.record_stride == 0 || step == steps) {
      for (int i = 0; i < na; ++i) {
        TrajectoryRow row;
        row.time = t;
        row.agent = traj.agents[i];
        row.position = states[i].position;
        row.desired = dec.transform.apply(ref_positions[i]);
        row.deviation = traj.deviations[static_cast<size_t>(step) * na + i];
        row.input = inputs[i];
        traj.rows.push_back(row);
      }
    }

    if (step == steps) break;

    for (int i = 0; i < na; ++i) {
      states[i] = rk4_step(states[i], inputs[i], veh, options.dt);
      commanded_snap[i] = snaps[i];
      const QuadState& s = states[i];
      if (std::abs(s.roll) > bounds.max_tilt || std::abs(s.pitch) > bounds.max_tilt)
        raise(Errc::guard_tripped, "attitude guard for agent " + std::to_string(traj.agents[i]) +
                                       " at t=" + std::to_string(t + options.dt));
      if (s.thrust < bounds.min_thrust || s.thrust > bounds.max_thrust)
        raise(Errc::guard_tripped, "thrust guard for agent " + std::to_string(traj.agents[i]) +
                                       " at t=" + std::to_string(t + options.dt));
    }
  }
  return traj;
}

ErrorDynamics assemble_error_dynamics(const WeightModel& model, const GainSet& gains) {
  const int rho = 4;
  const int n_agents = static_cast<int>(model.leaders.size() + model.followers.size());
  const int depth = gains.feedback_depth;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n_agents, n_agents);

  ErrorDynamics out;
  out.a_sys = Eigen::MatrixXd::Zero(rho * n_agents, rho * n_agents);
  for (int block = 0; block + 1 < rho; ++block)
    out.a_sys.block(block * n_agents, (block + 1) * n_agents, n_agents, n_agents) = identity;
  for (int k = 1; k <= rho; ++k) {
    Eigen::MatrixXd h;
    if (depth == rho) {
      // With full-depth feedback the followers also feed forward their
      // in-neighbors' commanded order-rho derivative; eliminating that
      // algebraic loop conjugates the coupling away and the collective error
      // dynamics decouple into identical per-agent chains.
      h = -identity;
    } else if (k <= rho - depth - 1) {
      h = -identity;  // own-damping term
    } else {
      h = model.coupling;  // graph-coupled error feedback
    }
    out.a_sys.block((rho - 1) * n_agents, (rho - k) * n_agents, n_agents, n_agents) =
        gains.gamma[static_cast<size_t>(k - 1)] * h;
  }
  out.max_real_part = max_eigenvalue_real_part(out.a_sys);
  return out;
}

Eigen::VectorXd error_forcing(const WeightModel& model, const GainSet& gains,
                              const std::vector<Eigen::VectorXd>& leader_derivatives) {
  const int rho = 4;
  const int depth = gains.feedback_depth;
  const int nl = static_cast<int>(model.leaders.size());
  const int nf = static_cast<int>(model.followers.size());
  Eigen::VectorXd forcing = Eigen::VectorXd::Zero(nl + nf);
  // Unmatched reference derivatives of orders depth+1..rho, expanded to the
  // followers through the leader map; empty at full depth.
  for (int j = 0; j <= rho - depth - 1; ++j) {
    const double gamma_j = (j == 0) ? 1.0 : gains.gamma[static_cast<size_t>(j - 1)];
    const Eigen::VectorXd& z = leader_derivatives.at(static_cast<size_t>(rho - j));
    Eigen::VectorXd stacked(nl + nf);
    stacked.head(nl) = z;
    stacked.tail(nf) = model.leader_map * z;
    forcing -= gamma_j * stacked;
  }
  return forcing;
}

}  // namespace contdef
