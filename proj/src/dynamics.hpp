#pragma once

#include <array>
#include <functional>
#include <vector>

#include "comms.hpp"
#include "formation.hpp"

namespace contdef {

/// Quadcopter state: position, velocity, thrust per unit mass, attitude and
/// their rates. Thrust and the roll/pitch angles are double-integrator
/// channels driven by the input; yaw follows its own stable internal loop.
struct QuadState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double thrust = kGravity;  // force per unit mass
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  double thrust_rate = 0.0, roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;
};

struct ControlInput {
  double thrust_accel = 0.0;  // second derivative of thrust per unit mass
  double roll_accel = 0.0;
  double pitch_accel = 0.0;
};

struct VehicleParams {
  double gravity = kGravity;
  double yaw_gain = 4.0;
  double yaw_rate_gain = 4.0;
};

struct InputBounds {
  double max_thrust_accel = 200.0;                 // m/s^4 channel
  double max_angle_accel = 50.0;                   // rad/s^2
  double min_thrust = 0.2 * kGravity;
  double max_thrust = 2.5 * kGravity;
  double max_tilt = 60.0 * M_PI / 180.0;
  bool hard_fail_on_saturation = false;
};

struct GainSet {
  std::array<double, 4> gamma = {8.0, 24.0, 32.0, 16.0};  // (s+2)^4
  int feedback_depth = 4;  // orders of reference feedback, 1..4
  VehicleParams vehicle;

  /// All roots of s^4 + g1 s^3 + g2 s^2 + g3 s + g4 in the open left half-plane.
  bool stable() const;
};

/// Unit thrust direction (body z-axis in world coordinates) and its angle
/// partials; the layout matches the third row of the 3-2-1 rotation matrix.
Vec3 thrust_direction(double roll, double pitch, double yaw);
Vec3 thrust_direction_d_roll(double roll, double pitch, double yaw);
Vec3 thrust_direction_d_pitch(double roll, double pitch, double yaw);
Vec3 thrust_direction_d_yaw(double roll, double pitch, double yaw);

QuadState quad_derivative(const QuadState& state, const ControlInput& input,
                          const VehicleParams& params);

/// Translational acceleration and jerk implied by the state alone.
Vec3 acceleration_of(const QuadState& state, const VehicleParams& params);
Vec3 jerk_of(const QuadState& state);

/// Inverts the input-to-snap map: the returned input makes the fourth
/// derivative of position equal desired_snap exactly.
ControlInput feedback_linearize(const QuadState& state, const Vec3& desired_snap,
                                const VehicleParams& params);

/// Tracking law on the linearized quadruple-integrator chain. own holds
/// derivatives of the vehicle's own position (orders 0..3), reference holds
/// the desired position and derivatives (orders 0..4). With full feedback
/// depth the order-4 reference term enters as feedforward.
Vec3 control_law(const std::array<Vec3, 4>& own, const std::array<Vec3, 5>& reference,
                 const GainSet& gains);

/// Plan interface consumed by the simulator: desired position and
/// derivatives through order 4 for the given leader (by ordinal).
using LeaderMotion = std::function<std::array<Vec3, 5>(int leader_ordinal, double t)>;

LeaderMotion stationary_motion(const ReferenceConfiguration& cfg);

struct SimOptions {
  double dt = 0.005;
  double duration = 10.0;
  int record_stride = 1;
  InputBounds bounds;
};

struct TrajectoryRow {
  double time;
  int agent;
  Vec3 position;
  Vec3 desired;
  double deviation;
  ControlInput input;
};

struct TeamTrajectory {
  std::vector<int> agents;  // leaders first, then followers
  double dt = 0.0;

  // Full-rate records used by certification.
  std::vector<double> times;
  std::vector<double> deviations;  // times.size() x agents.size(), row-major
  std::vector<Vec3> positions;     // same layout
  std::vector<HomogeneousTransform> desired_transforms;
  std::vector<DeformationFeatures> features;
  std::vector<double> min_desired_separation;

  // Strided rows for CSV output.
  std::vector<TrajectoryRow> rows;

  double sup_deviation = 0.0;
  double sup_deviation_time = 0.0;
  int sup_deviation_agent = -1;
  double max_thrust_accel = 0.0;
  double max_roll_accel = 0.0;
  double max_pitch_accel = 0.0;
  int saturated_steps = 0;

  int agent_index(int id) const;
  double deviation_at(size_t step, size_t agent_idx) const {
    return deviations[step * agents.size() + agent_idx];
  }
  const Vec3& position_at(size_t step, size_t agent_idx) const {
    return positions[step * agents.size() + agent_idx];
  }
};

/// Closed-loop rollout: leaders track the analytic plan, followers track the
/// real-weight combination of their in-neighbors' current motion. Desired
/// positions are rebuilt each step by decomposing the leader plan.
TeamTrajectory simulate_team(const ReferenceConfiguration& cfg, const WeightModel& model,
                             const LeaderMotion& leader_motion, const GainSet& gains,
                             const SimOptions& options);

/// Companion-form collective error dynamics for one coordinate axis (axes are
/// identical under uniform gains).
struct ErrorDynamics {
  Eigen::MatrixXd a_sys;
  double max_real_part = 0.0;
};

ErrorDynamics assemble_error_dynamics(const WeightModel& model, const GainSet& gains);

/// Forcing on the top error block from the leader reference derivatives:
/// zero at full feedback depth, otherwise the unmatched reference derivative
/// terms expanded through the follower-to-leader map.
Eigen::VectorXd error_forcing(const WeightModel& model, const GainSet& gains,
                              const std::vector<Eigen::VectorXd>& leader_derivatives);

}  // namespace contdef
