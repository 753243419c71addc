#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "geometry.hpp"

using namespace contdef;
using std::numbers::pi;

namespace {

const std::vector<Vec3> kTable2Leaders = {
    {-30.0, -40.0, 0.0}, {-30.0, 40.0, 0.0}, {50.0, 0.0, 0.0}, {0.0, 0.0, 60.0}};

double wrap_angle(double a) {
  while (a > pi) a -= 2.0 * pi;
  while (a < -pi) a += 2.0 * pi;
  return a;
}

DeformationFeatures random_features(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> stretch(0.3, 2.5);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  DeformationFeatures f;
  f.n = n;
  f.lambda1 = stretch(rng);
  f.d = Vec3(shift(rng), shift(rng), shift(rng));
  if (n == 1) {
    f.theta_r = angle(rng);
    f.psi_r = angle(rng);
    return f;
  }
  f.lambda2 = stretch(rng);
  if (f.lambda2 > f.lambda1) std::swap(f.lambda1, f.lambda2);
  f.psi_u = angle(rng);
  f.phi_r = angle(rng);
  f.theta_r = angle(rng);
  f.psi_r = angle(rng);
  if (n == 3) {
    f.lambda3 = stretch(rng);
    if (f.lambda3 > f.lambda2) std::swap(f.lambda2, f.lambda3);
    if (f.lambda2 > f.lambda1) std::swap(f.lambda1, f.lambda2);
    f.phi_u = angle(rng);
    f.theta_u = angle(rng);
  }
  return f;
}

std::vector<Vec3> reference_simplex(int n) {
  if (n == 1) return {{-3.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
  if (n == 2) return {{0.0, 0.0, 0.0}, {4.0, 0.5, 0.0}, {1.0, 3.0, 0.0}};
  return kTable2Leaders;
}

}  // namespace

TEST_CASE("simplex_rank on fixed configurations") {
  CHECK(simplex_rank(kTable2Leaders) == 3);
  std::vector<Vec3> collinear = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK(simplex_rank(collinear) == 1);
  std::vector<Vec3> planar = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK(simplex_rank(planar) == 2);
  std::vector<Vec3> coincident = {{1, 1, 1}, {1, 1, 1}};
  CHECK(simplex_rank(coincident) == 0);
}

TEST_CASE("barycentric coordinates") {
  SUBCASE("boundary follower of the tetrahedron scenario") {
    Eigen::VectorXd w = barycentric(kTable2Leaders, Vec3(25, 40, 30), 3);
    CHECK(w(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w(3) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("vertex maps to a unit weight") {
    Eigen::VectorXd w = barycentric(kTable2Leaders, kTable2Leaders[0], 3);
    CHECK(w(0) == doctest::Approx(1.0));
    CHECK(w.tail(3).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("triangle centroid") {
    std::vector<Vec3> tri = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}};
    Eigen::VectorXd w = barycentric(tri, Vec3(1, 1, 0), 2);
    for (int i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("sum to one for random queries") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vec3 c(dist(rng), dist(rng), dist(rng));
      Eigen::VectorXd w = barycentric(kTable2Leaders, c, 3);
      CHECK(std::abs(w.sum() - 1.0) < 1e-12);
      // Reconstruction is exact.
      Vec3 rebuilt = Vec3::Zero();
      for (int i = 0; i < 4; ++i) rebuilt += w(i) * kTable2Leaders[i];
      CHECK((rebuilt - c).norm() < 1e-9);
    }
  }
  SUBCASE("errors") {
    std::vector<Vec3> degenerate = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    CHECK_THROWS_AS((void)barycentric(degenerate, Vec3(0.5, 0, 0), 2), Error);
    std::vector<Vec3> tri = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}};
    CHECK_THROWS_AS((void)barycentric(tri, Vec3(1, 1, 0.5), 2), Error);
  }
}

TEST_CASE("rotation matrix properties") {
  CHECK(rotation_matrix(0, 0, 0).isIdentity(1e-15));

  // Symbolic evaluation of the layout at (0, 0, pi/2).
  Mat3 r = rotation_matrix(0, 0, pi / 2);
  Mat3 expected;
  expected << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  CHECK((r - expected).norm() < 1e-12);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> angle(-pi, pi);
  for (int trial = 0; trial < 1000; ++trial) {
    const double b1 = angle(rng), b2 = angle(rng), b3 = angle(rng);
    Mat3 m = rotation_matrix(b1, b2, b3);
    CHECK((m.transpose() * m - Mat3::Identity()).norm() < 1e-12);
    CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    Mat3 factored =
        rotation_matrix(b1, 0, 0) * rotation_matrix(0, b2, 0) * rotation_matrix(0, 0, b3);
    CHECK((m - factored).norm() < 1e-12);
  }
}

TEST_CASE("rotation angle extraction inverts the matrix") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  for (int trial = 0; trial < 500; ++trial) {
    const double b1 = angle(rng), b2 = angle(rng), b3 = angle(rng);
    double r1, r2, r3;
    rotation_angles(rotation_matrix(b1, b2, b3), r1, r2, r3);
    CHECK(wrap_angle(r1 - b1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r2 == doctest::Approx(b2).epsilon(1e-9));
    CHECK(wrap_angle(r3 - b3) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("gimbal configuration still reproduces the matrix") {
    Mat3 m = rotation_matrix(0.4, pi / 2, -0.3);
    double r1, r2, r3;
    rotation_angles(m, r1, r2, r3);
    CHECK((rotation_matrix(r1, r2, r3) - m).norm() < 1e-9);
  }
}

TEST_CASE("build_deformation basics") {
  DeformationFeatures identity;
  HomogeneousTransform ht = build_deformation(identity);
  CHECK(ht.q.isIdentity(1e-15));
  CHECK(ht.d.norm() == 0.0);

  DeformationFeatures stretch;
  stretch.lambda1 = 2.0;
  HomogeneousTransform ht2 = build_deformation(stretch);
  CHECK((ht2.q - Vec3(2, 1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-14);

  DeformationFeatures bad;
  bad.lambda2 = -0.5;
  CHECK_THROWS_AS((void)build_deformation(bad), Error);
}

TEST_CASE("polar decomposition") {
  SUBCASE("identity and diagonal") {
    PolarFactors id = polar_decompose(Mat3::Identity());
    CHECK(id.rotation.isIdentity(1e-12));
    CHECK(id.stretch.isIdentity(1e-12));

    Mat3 diag = Vec3(2.0, 0.5, 1.0).asDiagonal();
    PolarFactors pf = polar_decompose(diag);
    CHECK(pf.rotation.isIdentity(1e-12));
    CHECK((pf.stretch - diag).norm() < 1e-12);
  }
  SUBCASE("synthesize-and-recover oracle") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> angle(-pi, pi);
    std::uniform_real_distribution<double> stretch(0.2, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
      Mat3 basis = rotation_matrix(angle(rng), angle(rng) / 2, angle(rng));
      Vec3 lambda(stretch(rng), stretch(rng), stretch(rng));
      Mat3 u_true = basis.transpose() * lambda.asDiagonal() * basis;
      Mat3 r_true = rotation_matrix(angle(rng), angle(rng) / 2, angle(rng));
      PolarFactors pf = polar_decompose(r_true * u_true);
      CHECK((pf.stretch - u_true).norm() < 1e-9);
      CHECK((pf.rotation - r_true).norm() < 1e-9);
      CHECK((pf.stretch - pf.stretch.transpose()).norm() < 1e-12);
      CHECK((pf.rotation.transpose() * pf.rotation - Mat3::Identity()).norm() < 1e-10);
      CHECK((pf.rotation * pf.stretch - r_true * u_true).norm() <
            1e-9 * (r_true * u_true).norm());
    }
  }
  SUBCASE("rejects singular and reflecting inputs") {
    Mat3 singular = Mat3::Zero();
    CHECK_THROWS_AS((void)polar_decompose(singular), Error);
    Mat3 reflect = Vec3(-1.0, 1.0, 1.0).asDiagonal();
    CHECK_THROWS_AS((void)polar_decompose(reflect), Error);
  }
}

TEST_CASE("1-D decomposition") {
  SUBCASE("pure stretch") {
    std::array<Vec3, 2> ref = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    std::array<Vec3, 2> now = {Vec3(0, 0, 0), Vec3(2, 0, 0)};
    DeformationFeatures f = decompose_1d(ref, now);
    CHECK(f.lambda1 == doctest::Approx(2.0));
    CHECK(f.theta_r == doctest::Approx(0.0));
    CHECK(f.psi_r == doctest::Approx(0.0));
    CHECK(f.d.norm() < 1e-12);
  }
  SUBCASE("axis flip onto -z; theta_r from -asin(u.z)") {
    std::array<Vec3, 2> ref = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    std::array<Vec3, 2> now = {Vec3(0, 0, 0), Vec3(0, 0, -1)};
    DeformationFeatures f = decompose_1d(ref, now);
    CHECK(f.lambda1 == doctest::Approx(1.0));
    CHECK(f.theta_r == doctest::Approx(pi / 2));
  }
  SUBCASE("round trip") {
    std::mt19937 rng(31);
    std::vector<Vec3> ref = reference_simplex(1);
    for (int trial = 0; trial < 500; ++trial) {
      DeformationFeatures f = random_features(rng, 1);
      HomogeneousTransform ht = build_deformation(f);
      std::array<Vec3, 2> now = {ht.apply(ref[0]), ht.apply(ref[1])};
      DeformationFeatures rec =
          decompose_1d(std::span<const Vec3, 2>(ref.data(), 2), now);
      CHECK(rec.lambda1 == doctest::Approx(f.lambda1).epsilon(1e-9));
      CHECK(rec.theta_r == doctest::Approx(f.theta_r).epsilon(1e-9));
      CHECK(wrap_angle(rec.psi_r - f.psi_r) == doctest::Approx(0.0).epsilon(1e-9));
      CHECK((rec.d - f.d).norm() < 1e-9 * (1.0 + f.d.norm()));
    }
  }
  SUBCASE("coincident pair") {
    std::array<Vec3, 2> ref = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    std::array<Vec3, 2> now = {Vec3(3, 3, 3), Vec3(3, 3, 3)};
    CHECK_THROWS_AS((void)decompose_1d(ref, now), Error);
  }
}

TEST_CASE("2-D decomposition") {
  SUBCASE("pure translation") {
    std::vector<Vec3> ref = reference_simplex(2);
    Vec3 shift(7.0, -2.0, 4.0);
    std::array<Vec3, 3> now = {ref[0] + shift, ref[1] + shift, ref[2] + shift};
    DeformationFeatures f =
        decompose_2d(std::span<const Vec3, 3>(ref.data(), 3), now);
    CHECK(f.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.lambda2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(f.phi_r) < 1e-9);
    CHECK(std::abs(f.theta_r) < 1e-9);
    CHECK(std::abs(f.psi_r) < 1e-9);
    CHECK((f.d - shift).norm() < 1e-9);
  }
  SUBCASE("isotropic scale about the origin") {
    std::vector<Vec3> ref = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    std::array<Vec3, 3> now = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0)};
    DeformationFeatures f =
        decompose_2d(std::span<const Vec3, 3>(ref.data(), 3), now);
    CHECK(f.lambda1 == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.lambda2 == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.d.norm() < 1e-9);
  }
  SUBCASE("round trip") {
    std::mt19937 rng(37);
    std::vector<Vec3> ref = reference_simplex(2);
    for (int trial = 0; trial < 500; ++trial) {
      DeformationFeatures f = random_features(rng, 2);
      // Keep the recoverable branch: lambda1 > lambda2 and psi_u in (-pi/2, pi/2).
      if (f.lambda1 - f.lambda2 < 1e-3) f.lambda1 += 0.1;
      HomogeneousTransform ht = build_deformation(f);
      std::array<Vec3, 3> now = {ht.apply(ref[0]), ht.apply(ref[1]), ht.apply(ref[2])};
      DeformationFeatures rec =
          decompose_2d(std::span<const Vec3, 3>(ref.data(), 3), now);
      CHECK(rec.lambda1 == doctest::Approx(f.lambda1).epsilon(1e-8));
      CHECK(rec.lambda2 == doctest::Approx(f.lambda2).epsilon(1e-8));
      CHECK(wrap_angle(rec.psi_u - f.psi_u) == doctest::Approx(0.0).epsilon(1e-8));
      HomogeneousTransform rebuilt = build_deformation(rec);
      CHECK((rebuilt.q - ht.q).norm() < 1e-8 * ht.q.norm());
      CHECK((rebuilt.d - ht.d).norm() < 1e-7 * (1.0 + ht.d.norm()));
    }
  }
  SUBCASE("degenerate inputs") {
    std::vector<Vec3> collinear = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    std::array<Vec3, 3> now = {Vec3(0, 0, 0), Vec3(1, 1, 0), Vec3(2, 0, 0)};
    CHECK_THROWS_AS((void)decompose_2d(std::span<const Vec3, 3>(collinear.data(), 3), now),
                    Error);
  }
}

TEST_CASE("3-D decomposition") {
  std::vector<Vec3> ref = kTable2Leaders;
  auto ref4 = std::span<const Vec3, 4>(ref.data(), 4);

  SUBCASE("identity") {
    std::array<Vec3, 4> now = {ref[0], ref[1], ref[2], ref[3]};
    Decomposition dec = decompose_3d(ref4, now);
    CHECK(dec.transform.q.isIdentity(1e-10));
    CHECK(dec.transform.d.norm() < 1e-9);
  }
  SUBCASE("rigid displacement matching the takeoff endpoint") {
    Vec3 shift(100.0, 165.0, 200.0);
    std::array<Vec3, 4> now = {ref[0] + shift, ref[1] + shift, ref[2] + shift, ref[3] + shift};
    Decomposition dec = decompose_3d(ref4, now);
    CHECK(dec.transform.q.isIdentity(1e-9));
    CHECK((dec.transform.d - shift).norm() < 1e-9);
  }
  SUBCASE("random transform recovery") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
      DeformationFeatures f = random_features(rng, 3);
      HomogeneousTransform ht = build_deformation(f);
      std::array<Vec3, 4> now;
      for (int i = 0; i < 4; ++i) now[i] = ht.apply(ref[i]);
      Decomposition dec = decompose_3d(ref4, now);
      CHECK((dec.transform.q - ht.q).norm() < 1e-9 * ht.q.norm());
      CHECK((dec.transform.d - ht.d).norm() < 1e-8 * (1.0 + ht.d.norm()));
      CHECK(dec.features.lambda1 == doctest::Approx(f.lambda1).epsilon(1e-8));
      CHECK(dec.features.lambda2 == doctest::Approx(f.lambda2).epsilon(1e-8));
      CHECK(dec.features.lambda3 == doctest::Approx(f.lambda3).epsilon(1e-8));
    }
  }
  SUBCASE("degenerate reference tetrahedron") {
    std::vector<Vec3> flat = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    std::array<Vec3, 4> now = {flat[0], flat[1], flat[2], flat[3]};
    CHECK_THROWS_AS((void)decompose_3d(std::span<const Vec3, 4>(flat.data(), 4), now), Error);
  }
}

TEST_CASE("transform round trip reproduces arbitrary points") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  for (int n = 1; n <= 3; ++n) {
    std::vector<Vec3> ref = reference_simplex(n);
    for (int trial = 0; trial < 100; ++trial) {
      DeformationFeatures f = random_features(rng, n);
      HomogeneousTransform ht = build_deformation(f);
      std::vector<Vec3> now(ref.size());
      for (size_t i = 0; i < ref.size(); ++i) now[i] = ht.apply(ref[i]);
      Decomposition dec = decompose(n, ref, now);
      Vec3 p(dist(rng), dist(rng), dist(rng));
      CHECK((dec.transform.apply(p) - ht.apply(p)).norm() < 1e-8);
    }
  }
}

TEST_CASE("feature round trip through build and stretch_features") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 500; ++trial) {
    DeformationFeatures f = random_features(rng, 3);
    HomogeneousTransform ht = build_deformation(f);
    PolarFactors pf = polar_decompose(ht.q);
    DeformationFeatures rec = stretch_features(pf.stretch, 3);
    // Angles may wrap; the rebuilt stretch matrix is the invariant object.
    Mat3 ru = rotation_matrix(rec.phi_u, rec.theta_u, rec.psi_u);
    Mat3 rebuilt = ru.transpose() *
                   Vec3(rec.lambda1, rec.lambda2, rec.lambda3).asDiagonal().toDenseMatrix() * ru;
    CHECK((rebuilt - pf.stretch).norm() < 1e-9 * pf.stretch.norm());
    CHECK(rec.lambda1 >= rec.lambda2);
    CHECK(rec.lambda2 >= rec.lambda3);
  }
}

TEST_CASE("stretch along a pinned direction") {
  Mat3 basis = rotation_matrix(0.0, -0.17, 0.71);
  Vec3 lambda(0.5, 1.3, 0.9);
  Mat3 u = basis.transpose() * lambda.asDiagonal() * basis;
  Vec3 pinned = basis.row(0).transpose();
  double residual = -1.0;
  CHECK(stretch_along(u, pinned, &residual) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(residual < 1e-12);
  // A non-eigenvector direction reports a nonzero residual.
  Vec3 off = (basis.row(0) + 0.4 * basis.row(1)).normalized().transpose();
  stretch_along(u, off, &residual);
  CHECK(residual > 1e-3);
}

TEST_CASE("point-to-face distances") {
  CHECK(point_segment_distance(Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)) ==
        doctest::Approx(1.0));
  CHECK(point_segment_distance(Vec3(3, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)) ==
        doctest::Approx(2.0));
  // Above the interior: plain height.
  CHECK(point_triangle_distance(Vec3(0.2, 0.2, 2.0), Vec3(0, 0, 0), Vec3(1, 0, 0),
                                Vec3(0, 1, 0)) == doctest::Approx(2.0));
  // Beyond an edge: distance to the closest edge point.
  CHECK(point_triangle_distance(Vec3(2, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)) ==
        doctest::Approx(1.0));
  CHECK(point_triangle_distance(Vec3(-1, -1, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)) ==
        doctest::Approx(std::sqrt(2.0)));
}
