#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace contdef {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Error categories; values stay in sync with the CD_E_* codes of the C API.
enum class Errc : int {
  ok = 0,
  degenerate_simplex = 1,
  off_hyperplane = 2,
  invalid_feature = 3,
  singular_transform = 4,
  orientation_reversing = 5,
  not_positive_definite = 6,
  containment_violated = 7,
  unreachable = 8,
  singular_weight_system = 9,
  missing_neighbor = 10,
  singular_linearization = 11,
  guard_tripped = 12,
  input_saturated = 13,
  angles_not_constant = 14,
  too_dense = 15,
  out_of_segment = 16,
  no_path = 17,
  invalid_endpoint = 18,
  infeasible_segment = 19,
  parse_error = 20,
  schema_error = 21,
  io_error = 22,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

/// Affine map r -> Q*r + d with nonsingular Q.
struct HomogeneousTransform {
  Mat3 q = Mat3::Identity();
  Vec3 d = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return q * p + d; }
};

/// Eigen-feature parameterization of a homogeneous transform (Q, d):
/// principal stretches, stretch-direction angles, rotation angles, displacement.
struct DeformationFeatures {
  int n = 3;  // deformation dimension, 1..3
  double lambda1 = 1.0, lambda2 = 1.0, lambda3 = 1.0;
  double phi_u = 0.0, theta_u = 0.0, psi_u = 0.0;  // stretch-direction angles
  double phi_r = 0.0, theta_r = 0.0, psi_r = 0.0;  // rotation angles
  Vec3 d = Vec3::Zero();

  double min_in_scope_stretch() const {
    double m = lambda1;
    if (n >= 2) m = std::min(m, lambda2);
    if (n >= 3) m = std::min(m, lambda3);
    return m;
  }
};

constexpr double kGravity = 9.81;  // m/s^2

}  // namespace contdef
