#include "geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace contdef {

namespace {

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

Eigen::Matrix<double, 3, Eigen::Dynamic> edge_matrix(std::span<const Vec3> points) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> edges(3, points.size() - 1);
  for (size_t i = 1; i < points.size(); ++i) edges.col(i - 1) = points[i] - points[0];
  return edges;
}

}  // namespace

int simplex_rank(std::span<const Vec3> points) {
  if (points.size() < 2 || points.size() > 4)
    raise(Errc::degenerate_simplex, "simplex needs 2 to 4 vertices");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(edge_matrix(points));
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > kRankTolerance * sigma(0)) ++rank;
  return rank;
}

namespace {

Eigen::VectorXd barycentric_impl(std::span<const Vec3> points, const Vec3& c, int n,
                                 bool enforce_hyperplane) {
  if (static_cast<int>(points.size()) != n + 1)
    raise(Errc::degenerate_simplex, "expected n+1 vertices");
  if (simplex_rank(points) < n) raise(Errc::degenerate_simplex, "vertices do not span a simplex");

  Eigen::VectorXd theta(n + 1);
  if (n == 3) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i) {
      m.block<3, 1>(0, i) = points[i];
      m(3, i) = 1.0;
    }
    Eigen::Vector4d rhs;
    rhs << c, 1.0;
    theta = m.partialPivLu().solve(rhs);
  } else {
    // Solve in the affine hull; the trailing weights come from a least-squares
    // projection and the residual flags points off the hyperplane.
    Eigen::MatrixXd edges = edge_matrix(points);
    Eigen::VectorXd rest =
        edges.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(c - points[0]);
    double residual = (c - points[0] - edges * rest).norm();
    if (enforce_hyperplane && residual > kHyperplaneTolerance)
      raise(Errc::off_hyperplane, "point lies off the simplex hyperplane");
    theta(0) = 1.0 - rest.sum();
    theta.tail(n) = rest;
  }
  return theta;
}

}  // namespace

Eigen::VectorXd barycentric(std::span<const Vec3> points, const Vec3& c, int n) {
  return barycentric_impl(points, c, n, true);
}

Eigen::VectorXd barycentric_projected(std::span<const Vec3> points, const Vec3& c, int n) {
  return barycentric_impl(points, c, n, false);
}

Mat3 rotation_matrix(double beta1, double beta2, double beta3) {
  const double c1 = std::cos(beta1), s1 = std::sin(beta1);
  const double c2 = std::cos(beta2), s2 = std::sin(beta2);
  const double c3 = std::cos(beta3), s3 = std::sin(beta3);
  Mat3 r;
  r << c2 * c3, c2 * s3, -s2,                                        //
      s1 * s2 * c3 - c1 * s3, s1 * s2 * s3 + c1 * c3, s1 * c2,       //
      c1 * s2 * c3 + s1 * s3, c1 * s2 * s3 - s1 * c3, c1 * c2;
  return r;
}

void rotation_angles(const Mat3& r, double& beta1, double& beta2, double& beta3) {
  beta2 = -std::asin(clamp_unit(r(0, 2)));
  if (std::abs(std::cos(beta2)) < 1e-9) {
    // Gimbal configuration: only beta1 -/+ beta3 is determined; pin beta1 = 0.
    beta1 = 0.0;
    beta3 = std::atan2(-r(1, 0), r(1, 1));
  } else {
    beta3 = std::atan2(r(0, 1), r(0, 0));
    beta1 = std::atan2(r(1, 2), r(2, 2));
  }
}

HomogeneousTransform build_deformation(const DeformationFeatures& f) {
  if (f.lambda1 <= 0.0 || f.lambda2 <= 0.0 || f.lambda3 <= 0.0)
    raise(Errc::invalid_feature, "stretches must be strictly positive");
  if (f.n < 1 || f.n > 3) raise(Errc::invalid_feature, "dimension must be 1, 2 or 3");
  const double tol = 1e-9;
  if (f.n <= 2 && (std::abs(f.lambda3 - 1.0) > tol || std::abs(f.phi_u) > tol ||
                   std::abs(f.theta_u) > tol))
    raise(Errc::invalid_feature, "out-of-scope features must stay at their pinned values");
  if (f.n == 1 && (std::abs(f.lambda2 - 1.0) > tol || std::abs(f.psi_u) > tol ||
                   std::abs(f.phi_r) > tol))
    raise(Errc::invalid_feature, "out-of-scope features must stay at their pinned values");

  // Angle triples act as active rotations R^T: the stretch directions are the
  // rows of rotation_matrix(stretch angles) and the rotation factor maps the
  // first axis to (cos(theta_r)cos(psi_r), cos(theta_r)sin(psi_r), -sin(theta_r)).
  Mat3 ru = rotation_matrix(f.phi_u, f.theta_u, f.psi_u);
  Vec3 lambda(f.lambda1, f.lambda2, f.lambda3);
  Mat3 stretch = ru.transpose() * lambda.asDiagonal() * ru;
  HomogeneousTransform ht;
  ht.q = rotation_matrix(f.phi_r, f.theta_r, f.psi_r).transpose() * stretch;
  ht.d = f.d;
  return ht;
}

PolarFactors polar_decompose(const Mat3& q) {
  const double det = q.determinant();
  const double scale = q.norm();
  if (std::abs(det) < 1e-12 * scale * scale * scale || scale == 0.0)
    raise(Errc::singular_transform, "transform is singular");
  if (det < 0.0) raise(Errc::orientation_reversing, "transform reverses orientation");

  Eigen::SelfAdjointEigenSolver<Mat3> eig(q.transpose() * q);
  Vec3 values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat3& vectors = eig.eigenvectors();
  PolarFactors out;
  out.stretch = vectors * values.asDiagonal() * vectors.transpose();
  out.rotation = q * (vectors * values.cwiseInverse().asDiagonal() * vectors.transpose());
  return out;
}

namespace {

// Deterministic eigenvector sign: first component of meaningful magnitude
// is made positive.
Vec3 fix_sign(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > 1e-9) return v(i) > 0 ? v : Vec3(-v);
  }
  return v;
}

}  // namespace

DeformationFeatures stretch_features(const Mat3& stretch, int n) {
  DeformationFeatures f;
  f.n = n;
  if (n == 1) {
    f.lambda1 = stretch(0, 0);
    return f;
  }
  if (n == 2) {
    const double a = stretch(0, 0), b = stretch(0, 1), c = stretch(1, 1);
    const double mean = 0.5 * (a + c);
    const double gap = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    f.lambda1 = mean + gap;
    f.lambda2 = mean - gap;
    if (f.lambda2 <= 0.0) raise(Errc::not_positive_definite, "in-plane stretch not positive");
    const double scale = std::abs(a) + std::abs(c) + std::abs(b);
    f.psi_u = (gap < 1e-12 * scale) ? 0.0 : 0.5 * std::atan2(2.0 * b, a - c);
    return f;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(stretch);
  if (eig.eigenvalues()(0) <= 0.0)
    raise(Errc::not_positive_definite, "stretch matrix has a non-positive eigenvalue");
  // Isotropic stretch: every basis is an eigenbasis, report zero angles.
  if (eig.eigenvalues()(2) - eig.eigenvalues()(0) < 1e-9 * eig.eigenvalues()(2)) {
    f.lambda1 = f.lambda2 = f.lambda3 = eig.eigenvalues()(1);
    return f;
  }
  // Eigen reports ascending order; features want lambda1 >= lambda2 >= lambda3.
  Vec3 u1 = fix_sign(eig.eigenvectors().col(2));
  Vec3 u2 = fix_sign(eig.eigenvectors().col(1));
  Vec3 u3 = u1.cross(u2);
  f.lambda1 = eig.eigenvalues()(2);
  f.lambda2 = eig.eigenvalues()(1);
  f.lambda3 = eig.eigenvalues()(0);
  Mat3 ru;
  ru.row(0) = u1.transpose();
  ru.row(1) = u2.transpose();
  ru.row(2) = u3.transpose();
  rotation_angles(ru, f.phi_u, f.theta_u, f.psi_u);
  return f;
}

double stretch_along(const Mat3& stretch, const Vec3& unit_dir, double* residual) {
  const double lambda = unit_dir.dot(stretch * unit_dir);
  if (residual) *residual = (stretch * unit_dir - lambda * unit_dir).norm();
  return lambda;
}

DeformationFeatures decompose_1d(std::span<const Vec3, 2> leaders_ref,
                                 std::span<const Vec3, 2> leaders_now) {
  const Vec3 ref_edge = leaders_ref[1] - leaders_ref[0];
  const Vec3 now_edge = leaders_now[1] - leaders_now[0];
  if (std::abs(ref_edge.y()) > kHyperplaneTolerance || std::abs(ref_edge.z()) > kHyperplaneTolerance)
    raise(Errc::off_hyperplane, "1-D reference leaders must lie on the first axis");
  if (std::abs(ref_edge.x()) < 1e-12 || now_edge.norm() < 1e-12)
    raise(Errc::degenerate_simplex, "coincident leader pair");

  DeformationFeatures f;
  f.n = 1;
  f.lambda1 = now_edge.norm() / std::abs(ref_edge.x());
  // Image of the first axis direction, sign-consistent with the reference edge.
  const Vec3 u1 = (ref_edge.x() > 0 ? 1.0 : -1.0) * now_edge.normalized();
  f.theta_r = -std::asin(clamp_unit(u1.z()));
  f.psi_r = std::atan2(u1.y(), u1.x());
  f.d = leaders_now[0] - build_deformation(f).q * leaders_ref[0];
  return f;
}

DeformationFeatures decompose_2d(std::span<const Vec3, 3> leaders_ref,
                                 std::span<const Vec3, 3> leaders_now) {
  for (const Vec3& p : leaders_ref)
    if (std::abs(p.z()) > kHyperplaneTolerance)
      raise(Errc::off_hyperplane, "2-D reference leaders must lie in the z=0 plane");
  if (simplex_rank(std::span<const Vec3>(leaders_ref)) < 2)
    raise(Errc::degenerate_simplex, "reference leaders are collinear");
  if (simplex_rank(std::span<const Vec3>(leaders_now)) < 2)
    raise(Errc::degenerate_simplex, "current leaders are collinear");

  // Squared lengths of the three triangle edges determine the squared
  // stretch entries (a, b, c) through a 3x3 linear system.
  Mat3 system;
  Vec3 rhs;
  const int pairs[3][2] = {{1, 0}, {2, 1}, {0, 2}};
  for (int k = 0; k < 3; ++k) {
    const Vec3 e0 = leaders_ref[pairs[k][0]] - leaders_ref[pairs[k][1]];
    const Vec3 ed = leaders_now[pairs[k][0]] - leaders_now[pairs[k][1]];
    system.row(k) << e0.x() * e0.x(), 2.0 * e0.x() * e0.y(), e0.y() * e0.y();
    rhs(k) = ed.squaredNorm();
  }
  Eigen::PartialPivLU<Mat3> lu(system);
  if (std::abs(lu.determinant()) < 1e-12 * std::pow(system.norm(), 3))
    raise(Errc::degenerate_simplex, "edge system is singular");
  const Vec3 abc = lu.solve(rhs);
  const double a = abc(0), b = abc(1), c = abc(2);

  const double mean = 0.5 * (a + c);
  const double gap = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  if (mean - gap <= 0.0)
    raise(Errc::not_positive_definite, "recovered squared stretch is not positive definite");

  DeformationFeatures f;
  f.n = 2;
  f.lambda1 = std::sqrt(mean + gap);
  f.lambda2 = std::sqrt(mean - gap);
  const double scale = std::abs(a) + std::abs(b) + std::abs(c);
  f.psi_u = (gap < 1e-12 * scale) ? 0.0 : 0.5 * std::atan2(2.0 * b, a - c);

  const double cpsi = std::cos(f.psi_u), spsi = std::sin(f.psi_u);
  Mat3 stretch;
  stretch << f.lambda1 * cpsi * cpsi + f.lambda2 * spsi * spsi,
      (f.lambda1 - f.lambda2) * spsi * cpsi, 0.0,                       //
      (f.lambda1 - f.lambda2) * spsi * cpsi,
      f.lambda1 * spsi * spsi + f.lambda2 * cpsi * cpsi, 0.0,           //
      0.0, 0.0, 1.0;

  // Q maps the two reference edges onto their images and the reference plane
  // normal onto the deformed plane normal.
  const Vec3 v1_ref = leaders_ref[1] - leaders_ref[0];
  const Vec3 v2_ref = leaders_ref[2] - leaders_ref[1];
  const Vec3 v1_now = leaders_now[1] - leaders_now[0];
  const Vec3 v2_now = leaders_now[2] - leaders_now[1];
  Mat3 basis_ref, basis_now;
  basis_ref << v1_ref, v2_ref, v1_ref.cross(v2_ref).normalized();
  basis_now << v1_now, v2_now, v1_now.cross(v2_now).normalized();
  const Mat3 q = basis_now * basis_ref.inverse();

  const Mat3 rotation = q * stretch.inverse();
  rotation_angles(rotation.transpose(), f.phi_r, f.theta_r, f.psi_r);
  f.d = leaders_now[0] - q * leaders_ref[0];
  return f;
}

TetrahedronDecomposer::TetrahedronDecomposer(std::span<const Vec3, 4> leaders_ref) {
  if (simplex_rank(std::span<const Vec3>(leaders_ref)) < 3)
    raise(Errc::degenerate_simplex, "reference tetrahedron is degenerate");
  // Unknowns: the three rows of Q, then d. One block of four equations per
  // coordinate axis.
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(12, 12);
  for (int axis = 0; axis < 3; ++axis) {
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 3; ++k) system(axis * 4 + i, axis * 3 + k) = leaders_ref[i](k);
      system(axis * 4 + i, 9 + axis) = 1.0;
    }
  }
  lu_.compute(system);
}

HomogeneousTransform TetrahedronDecomposer::solve(std::span<const Vec3, 4> leaders_now) const {
  Eigen::VectorXd rhs(12);
  for (int axis = 0; axis < 3; ++axis)
    for (int i = 0; i < 4; ++i) rhs(axis * 4 + i) = leaders_now[i](axis);
  Eigen::VectorXd x = lu_.solve(rhs);
  HomogeneousTransform ht;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) ht.q(row, col) = x(row * 3 + col);
  ht.d = x.tail<3>();
  return ht;
}

Decomposition decompose_3d(std::span<const Vec3, 4> leaders_ref,
                           std::span<const Vec3, 4> leaders_now) {
  TetrahedronDecomposer dec(leaders_ref);
  Decomposition out;
  out.transform = dec.solve(leaders_now);
  PolarFactors polar = polar_decompose(out.transform.q);
  out.features = stretch_features(polar.stretch, 3);
  rotation_angles(polar.rotation.transpose(), out.features.phi_r, out.features.theta_r,
                  out.features.psi_r);
  out.features.d = out.transform.d;
  return out;
}

Decomposition decompose(int n, std::span<const Vec3> leaders_ref,
                        std::span<const Vec3> leaders_now) {
  if (leaders_ref.size() != static_cast<size_t>(n + 1) || leaders_now.size() != leaders_ref.size())
    raise(Errc::degenerate_simplex, "leader count must be n+1");
  if (n == 3)
    return decompose_3d(std::span<const Vec3, 4>(leaders_ref.data(), 4),
                        std::span<const Vec3, 4>(leaders_now.data(), 4));
  Decomposition out;
  if (n == 2)
    out.features = decompose_2d(std::span<const Vec3, 3>(leaders_ref.data(), 3),
                                std::span<const Vec3, 3>(leaders_now.data(), 3));
  else
    out.features = decompose_1d(std::span<const Vec3, 2>(leaders_ref.data(), 2),
                                std::span<const Vec3, 2>(leaders_now.data(), 2));
  out.transform = build_deformation(out.features);
  return out;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::max(0.0, std::min(1.0, (p - a).dot(ab) / len2));
  return (p - (a + t * ab)).norm();
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 normal = (b - a).cross(c - a);
  const double area2 = normal.squaredNorm();
  if (area2 > 0.0) {
    const Vec3 n = normal / std::sqrt(area2);
    const Vec3 projected = p - n.dot(p - a) * n;
    // Inside test via the sign of sub-triangle areas against each edge.
    const bool inside = ((b - a).cross(projected - a)).dot(normal) >= 0.0 &&
                        ((c - b).cross(projected - b)).dot(normal) >= 0.0 &&
                        ((a - c).cross(projected - c)).dot(normal) >= 0.0;
    if (inside) return std::abs(n.dot(p - a));
  }
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

}  // namespace contdef
