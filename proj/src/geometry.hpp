#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "types.hpp"

namespace contdef {

// Scale-relative singular value cutoff for simplex degeneracy tests.
inline constexpr double kRankTolerance = 1e-9;
// Points farther than this from the affine hull are rejected for n < 3.
inline constexpr double kHyperplaneTolerance = 1e-6;

/// Rank of the edge-vector matrix [p2-p1 ... pm-p1]; m-1 points span an
/// (m-1)-simplex iff this returns m-1.
int simplex_rank(std::span<const Vec3> points);

/// Barycentric coordinates of c with respect to the n+1 simplex vertices.
/// Components sum to one; all strictly positive iff c is inside the simplex.
Eigen::VectorXd barycentric(std::span<const Vec3> points, const Vec3& c, int n);

/// Same coordinates for the projection of c onto the simplex hyperplane;
/// never raises the off-hyperplane error (n < 3 only differs when c floats
/// off the plane).
Eigen::VectorXd barycentric_projected(std::span<const Vec3> points, const Vec3& c, int n);

/// 3-2-1 rotation matrix; R(0,0,0) = I and
/// R(b1,b2,b3) = R(b1,0,0) R(0,b2,0) R(0,0,b3).
Mat3 rotation_matrix(double beta1, double beta2, double beta3);

/// Inverse of rotation_matrix: angles (beta1, beta2, beta3) with
/// beta2 in [-pi/2, pi/2] and beta1, beta3 from quadrant-correct atan2.
void rotation_angles(const Mat3& r, double& beta1, double& beta2, double& beta3);

/// Q = R(rotation angles) * U with U = sum_i lambda_i u_i u_i^T,
/// u_i = R^T(stretch angles) e_i.
HomogeneousTransform build_deformation(const DeformationFeatures& f);

struct PolarFactors {
  Mat3 rotation;  // orthonormal, det +1
  Mat3 stretch;   // symmetric positive definite
};

/// Q = rotation * stretch with stretch = (Q^T Q)^(1/2).
PolarFactors polar_decompose(const Mat3& q);

/// Features of a symmetric positive definite stretch matrix for dimension n.
/// For n = 3 stretches are reported in decreasing order; for n = 2 the
/// in-plane pair is ordered lambda1 >= lambda2 with the out-of-plane
/// eigenvalue pinned to one.
DeformationFeatures stretch_features(const Mat3& stretch, int n);

/// Stretch along a prescribed unit direction, i.e. u^T U u; residual reports
/// how far u is from being an eigenvector of U (norm of U u - (u^T U u) u).
double stretch_along(const Mat3& stretch, const Vec3& unit_dir, double* residual = nullptr);

DeformationFeatures decompose_1d(std::span<const Vec3, 2> leaders_ref,
                                 std::span<const Vec3, 2> leaders_now);

DeformationFeatures decompose_2d(std::span<const Vec3, 3> leaders_ref,
                                 std::span<const Vec3, 3> leaders_now);

struct Decomposition {
  HomogeneousTransform transform;
  DeformationFeatures features;
};

Decomposition decompose_3d(std::span<const Vec3, 4> leaders_ref,
                           std::span<const Vec3, 4> leaders_now);

/// Dispatch on n over the 1-D/2-D/3-D closed forms, always returning the
/// reconstructed transform alongside the features.
Decomposition decompose(int n, std::span<const Vec3> leaders_ref,
                        std::span<const Vec3> leaders_now);

/// Reusable 3-D decomposer; the 12x12 system matrix depends only on the
/// reference tetrahedron, so its factorization is computed once.
class TetrahedronDecomposer {
 public:
  explicit TetrahedronDecomposer(std::span<const Vec3, 4> leaders_ref);
  HomogeneousTransform solve(std::span<const Vec3, 4> leaders_now) const;

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Minimum distance from a point to a segment (a, b).
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Minimum distance from a point to a filled triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace contdef
