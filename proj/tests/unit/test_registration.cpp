#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "dtinspect/bench.hpp"
#include "dtinspect/error.hpp"
#include "dtinspect/metrics.hpp"
#include "dtinspect/registration.hpp"
#include "dtinspect/renderer.hpp"
#include "dtinspect/test_meshes.hpp"
#include "test_util.hpp"

using namespace dtinspect;

namespace {

// Horn's closed-form absolute orientation via unit quaternions: an
// independent least-squares oracle for the SVD-based solver.
RigidTransform HornAlign(const std::vector<Eigen::Vector3d> &src, const std::vector<Eigen::Vector3d> &dst) {
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= src.size();
  md /= src.size();
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) s += (src[i] - ms) * (dst[i] - md).transpose();
  Eigen::Matrix4d n;
  n << s(0, 0) + s(1, 1) + s(2, 2), s(1, 2) - s(2, 1), s(2, 0) - s(0, 2), s(0, 1) - s(1, 0),
      s(1, 2) - s(2, 1), s(0, 0) - s(1, 1) - s(2, 2), s(0, 1) + s(1, 0), s(2, 0) + s(0, 2),
      s(2, 0) - s(0, 2), s(0, 1) + s(1, 0), -s(0, 0) + s(1, 1) - s(2, 2), s(1, 2) + s(2, 1),
      s(0, 1) - s(1, 0), s(2, 0) + s(0, 2), s(1, 2) + s(2, 1), -s(0, 0) - s(1, 1) + s(2, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(n);
  const Eigen::Vector4d q = es.eigenvectors().col(3);
  RigidTransform t;
  t.rotation = Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
  t.translation = md - t.rotation * ms;
  return t;
}

double Cost(const RigidTransform &t, const std::vector<Eigen::Vector3d> &src,
            const std::vector<Eigen::Vector3d> &dst) {
  double c = 0;
  for (std::size_t i = 0; i < src.size(); ++i) c += (t.Apply(src[i]) - dst[i]).squaredNorm();
  return c;
}

struct IcpScene {
  TriangleMesh mesh = MakeSuperellipsoid();
  CameraIntrinsics k = DefaultIntrinsics();
  RigidTransform gt = DefaultObjectPose();
  DepthImage depth = RenderDepthOnly(mesh, gt, k);
};

}  // namespace

TEST_SUITE("registration") {

TEST_CASE("area-uniform sampling on a split square") {
  TriangleMesh sq;
  sq.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  sq.triangles = {{0, 1, 2}, {0, 2, 3}};
  const PointCloud c = SampleMeshSurface(sq, 10000, 17);
  REQUIRE(c.size() == 10000);
  int lower = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto &p = c.points[i];
    CHECK(std::abs(p.z()) <= 1e-9);
    CHECK(p.x() >= -1e-12);
    CHECK(p.x() <= 1 + 1e-12);
    lower += p.x() > p.y();
    CHECK((c.normals[i] - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
  }
  // Binomial(10000, 1/2): 300 is six standard deviations.
  CHECK(std::abs(lower - 5000) <= 300);
  const PointCloud again = SampleMeshSurface(sq, 10000, 17);
  CHECK(again.points == c.points);
  CHECK_THROWS_AS(SampleMeshSurface(TriangleMesh{}, 10, 0), ValidationError);
}

TEST_CASE("samples on a tilted plane satisfy its equation") {
  TriangleMesh m;
  m.vertices = {{0, 0, 10}, {50, 0, 15}, {0, 40, 2}};
  m.triangles = {{0, 1, 2}};
  const Eigen::Vector3d n = (m.vertices[1] - m.vertices[0]).cross(m.vertices[2] - m.vertices[0]).normalized();
  const double d = n.dot(m.vertices[0]);
  for (const auto &p : SampleMeshSurface(m, 2000, 1).points) CHECK(std::abs(n.dot(p) - d) <= 1e-9);
}

TEST_CASE("normals of a plane face the camera") {
  PointCloud c;
  for (int y = -20; y <= 20; ++y)
    for (int x = -20; x <= 20; ++x) c.points.emplace_back(x, y, 500);
  const PointCloud n = EstimateNormals(c, 20);
  for (const auto &v : n.normals) CHECK((v - Eigen::Vector3d(0, 0, -1)).norm() < 1e-3);
  PointCloud tiny;
  tiny.points = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
  CHECK_THROWS_AS(EstimateNormals(tiny, 3), ValidationError);
}

TEST_CASE("noisy plane normals stay within two degrees") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.1);
  PointCloud c;
  for (int y = -30; y <= 30; ++y)
    for (int x = -30; x <= 30; ++x) c.points.emplace_back(2.0 * x, 2.0 * y, 500 + noise(rng));
  const PointCloud n = EstimateNormals(c, 20);
  for (const auto &v : n.normals) {
    CHECK(std::acos(std::min(1.0, -v.z())) * 180 / M_PI < 2.0);
  }
}

TEST_CASE("kabsch matches the quaternion oracle") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 8;
    const RigidTransform t = testutil::RandomTransform(rng);
    std::vector<Eigen::Vector3d> src(n), dst(n);
    for (int i = 0; i < n; ++i) {
      src[i] = {u(rng), u(rng), u(rng)};
      dst[i] = t.Apply(src[i]) + Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    }
    const auto k = KabschAlign(src, dst);
    REQUIRE(k);
    CHECK(IsValid(*k));
    const RigidTransform h = HornAlign(src, dst);
    CHECK(Cost(*k, src, dst) <= Cost(h, src, dst) + 1e-8);
    CHECK((k->rotation - h.rotation).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("kabsch degeneracies") {
  std::vector<Eigen::Vector3d> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
  CHECK_FALSE(KabschAlign(line, line));
  CHECK_FALSE(KabschAlign({{0, 0, 0}, {1, 0, 0}}, {{0, 0, 0}, {1, 0, 0}}));
  CHECK_THROWS_AS(KabschAlign(line, {{0, 0, 0}}), ValidationError);
  // Mirror-image configuration must still yield a proper rotation.
  std::vector<Eigen::Vector3d> a{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  std::vector<Eigen::Vector3d> b{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  const auto t = KabschAlign(a, b);
  REQUIRE(t);
  CHECK(t->rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("point-to-plane step recovers a small motion exactly on planes") {
  // Three orthogonal planes constrain all six degrees of freedom.
  std::vector<Eigen::Vector3d> dst, normals;
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      dst.emplace_back(i, j, 0);
      normals.emplace_back(0, 0, 1);
      dst.emplace_back(i, 0 * j - 6, j);
      normals.emplace_back(0, 1, 0);
      dst.emplace_back(-6, i, j);
      normals.emplace_back(1, 0, 0);
    }
  }
  const RigidTransform motion = RigidTransform::FromTranslation({0.2, -0.1, 0.3});
  std::vector<Eigen::Vector3d> src;
  for (const auto &p : dst) src.push_back(Invert(motion).Apply(p));
  const auto step = PointToPlaneStep(src, dst, normals);
  REQUIRE(step);
  CHECK((step->translation - motion.translation).norm() < 1e-9);
  // A single plane leaves the system singular.
  std::vector<Eigen::Vector3d> s1, d1, n1;
  for (int i = 0; i < 20; ++i) {
    d1.emplace_back(i, i * i % 7, 0);
    s1.emplace_back(i, i * i % 7, 0.5);
    n1.emplace_back(0, 0, 1);
  }
  CHECK_FALSE(PointToPlaneStep(s1, d1, n1));
}

TEST_CASE("exact recovery with point-to-point") {
  const PointCloud cloud = SampleMeshSurface(MakeSuperellipsoid(), 6000, 3);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    RigidTransform truth;
    truth.rotation = testutil::RandomRotation(rng);
    truth.translation = {5, -3, 300};
    PointCloud target;
    for (const auto &p : cloud.points) target.points.push_back(truth.Apply(p));
    PointCloud source;
    for (std::size_t i = 0; i < cloud.size(); i += 3) source.points.push_back(cloud.points[i]);

    PerturbationSpec spec{1, 3.0, 3.0, static_cast<std::uint64_t>(trial)};
    const RigidTransform initial = PerturbPose(truth, spec, 0);
    IcpParams params;
    params.method = IcpMethod::kPointToPoint;
    params.max_iterations = 500;
    params.convergence_rmse_delta = 1e-12;
    const IcpResult r = RegisterToTarget(source, PrepareTarget(target), initial, params);
    CHECK(r.method_used == IcpMethod::kPointToPoint);
    CHECK(RotationErrorDeg(r.refined_pose.rotation, truth.rotation) < 0.1);
    CHECK(TranslationErrorMm(r.refined_pose.translation, truth.translation) < 0.01);
    // Closed-form steps never increase the error of a fixed correspondence set.
    for (std::size_t i = 1; i < r.rmse_history.size(); ++i) {
      CHECK(r.rmse_history[i] <= r.rmse_history[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("icp refine on rendered depth") {
  const IcpScene s;
  IcpParams params;
  const IcpResult fixed = IcpRefine(s.mesh, s.depth, s.k, s.gt, params);
  CHECK(fixed.converged);
  CHECK(fixed.diagnostic.empty());
  CHECK(AddMetric(s.mesh.vertices, fixed.refined_pose, s.gt) < 0.01);
  CHECK(fixed.iterations <= params.max_iterations);

  RigidTransform start = s.gt;
  start.rotation = s.gt.rotation * RotationFromVector(Eigen::Vector3d(1, -1, 1).normalized() * 5 * M_PI / 180);
  start.translation += Eigen::Vector3d(3, -4, 0);
  const IcpResult r = IcpRefine(s.mesh, s.depth, s.k, start, params);
  CHECK(AddMetric(s.mesh.vertices, r.refined_pose, s.gt) < 1.0);
  CHECK(r.rmse >= 0.0);
  CHECK(r.rmse_history.size() == static_cast<std::size_t>(r.iterations) + 1);

  const IcpResult again = IcpRefine(s.mesh, s.depth, s.k, start, params);
  CHECK(again.refined_pose.rotation == r.refined_pose.rotation);
  CHECK(again.refined_pose.translation == r.refined_pose.translation);

  RigidTransform far = s.gt;
  far.rotation = s.gt.rotation * RotationFromVector(Eigen::Vector3d::UnitX() * M_PI / 2);
  IcpResult wild;
  CHECK_NOTHROW(wild = IcpRefine(s.mesh, s.depth, s.k, far, params));
  CHECK(IsValid(wild.refined_pose));
}

TEST_CASE("point-to-point fallback and degenerate scenes") {
  const IcpScene s;
  // Too few scene points for normals: falls back to point-to-point.
  PointCloud few;
  for (int i = 0; i < 10; ++i) few.points.emplace_back(i, i % 3, 400 + i % 2);
  IcpParams params;
  IcpTarget t = PrepareTarget(few);
  const PointCloud src = SampleMeshSurface(s.mesh, 500, 0);
  IcpResult r = RegisterToTarget(src, t, s.gt, params);
  CHECK(r.method_used == IcpMethod::kPointToPoint);
  CHECK_FALSE(r.converged);  // under 10% of samples can match

  DepthImage empty(s.k.width, s.k.height);
  r = IcpRefine(s.mesh, empty, s.k, s.gt, params);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.diagnostic.empty());

  PointCloud line;
  for (int i = 0; i < 50; ++i) line.points.emplace_back(i * 0.1, 0, 400);
  r = RegisterToTarget(src, PrepareTarget(line), s.gt, params);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("parameter validation") {
  IcpParams p;
  CHECK_NOTHROW(p.Validate());
  p.sample_count = 99;
  CHECK_THROWS_AS(p.Validate(), ValidationError);
  p = {};
  p.max_correspondence_distance = 0;
  CHECK_THROWS_AS(p.Validate(), ValidationError);
  p = {};
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.Validate(), ValidationError);
  CHECK(IcpMethodFromString(ToString(IcpMethod::kPointToPoint)) == IcpMethod::kPointToPoint);
  CHECK_THROWS_AS(IcpMethodFromString("plane"), ValidationError);
}

}  // TEST_SUITE
