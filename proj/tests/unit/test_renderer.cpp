#include <doctest.h>

#include <algorithm>
#include <cstring>

#include <random>

#include "dtinspect/error.hpp"
#include "dtinspect/png_io.hpp"
#include "dtinspect/renderer.hpp"
#include "dtinspect/test_meshes.hpp"
#include "test_util.hpp"

using namespace dtinspect;

namespace {

const CameraIntrinsics kCam{600, 600, 320, 240, 640, 480};

TriangleMesh OneTriangle(const Eigen::Vector3d &a, const Eigen::Vector3d &b, const Eigen::Vector3d &c) {
  TriangleMesh m;
  m.vertices = {a, b, c};
  m.triangles = {{0, 1, 2}};
  return m;
}

// Lifts an image-plane point (u, v) to depth z.
Eigen::Vector3d Lift(const CameraIntrinsics &k, double u, double v, double z) {
  return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

// Signed edge distances at the pixel sample; +1 inside, -1 outside, 0 within
// the vertex snapping tolerance of an edge.
int InsideOracle(const Eigen::Vector2d &a, const Eigen::Vector2d &b, const Eigen::Vector2d &c,
                 double x, double y) {
  auto edge = [&](const Eigen::Vector2d &p, const Eigen::Vector2d &q) {
    return ((q.x() - p.x()) * (y - p.y()) - (q.y() - p.y()) * (x - p.x())) / (q - p).norm();
  };
  const double e0 = edge(a, b), e1 = edge(b, c), e2 = edge(c, a);
  const double eps = 0.01;
  if ((e0 > eps && e1 > eps && e2 > eps) || (e0 < -eps && e1 < -eps && e2 < -eps)) return 1;
  if (std::abs(e0) <= eps || std::abs(e1) <= eps || std::abs(e2) <= eps) return 0;
  return -1;
}

}  // namespace

TEST_SUITE("renderer") {

TEST_CASE("empty mesh renders an empty frame") {
  const RgbdFrame f = RenderRgbd(TriangleMesh{}, RigidTransform::Identity(), kCam);
  CHECK(f.depth.width == 640);
  for (float d : f.depth.data) CHECK_FALSE(IsValidDepth(d));
  for (const Rgb8 &c : f.color.data) CHECK(c == Rgb8{0, 0, 0});
}

TEST_CASE("fronto-parallel triangle: depth and coverage oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 690.0), v(-40.0, 520.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Vector2d a(u(rng), v(rng)), b(u(rng), v(rng)), c(u(rng), v(rng));
    const TriangleMesh m = OneTriangle(Lift(kCam, a.x(), a.y(), 1000), Lift(kCam, b.x(), b.y(), 1000),
                                       Lift(kCam, c.x(), c.y(), 1000));
    const DepthImage d = RenderDepthOnly(m, RigidTransform::Identity(), kCam);
    for (int y = 0; y < kCam.height; ++y) {
      for (int x = 0; x < kCam.width; ++x) {
        const int inside = InsideOracle(a, b, c, x, y);
        const float z = d.at(x, y);
        if (inside == 1) {
          REQUIRE(IsValidDepth(z));
          CHECK(std::abs(z - 1000.0) <= 1e-3);
        } else if (inside == -1) {
          REQUIRE_FALSE(IsValidDepth(z));
        }
      }
    }
  }
}

TEST_CASE("slanted plane matches the plane equation") {
  // Plane z = 800 + 0.1 x: along a pixel ray x = (u - cx) z / fx.
  auto on_plane = [](double u, double v) {
    const double s = (u - kCam.cx) / kCam.fx;
    const double z = 800.0 / (1.0 - 0.1 * s);
    return Eigen::Vector3d(s * z, (v - kCam.cy) * z / kCam.fy, z);
  };
  TriangleMesh m;
  m.vertices = {on_plane(20, 20), on_plane(620, 30), on_plane(600, 460), on_plane(30, 450)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const DepthImage d = RenderDepthOnly(m, RigidTransform::Identity(), kCam);
  std::size_t covered = 0;
  for (int y = 0; y < kCam.height; ++y) {
    for (int x = 0; x < kCam.width; ++x) {
      if (!IsValidDepth(d.at(x, y))) continue;
      ++covered;
      CHECK(std::abs(d.at(x, y) - on_plane(x, y).z()) <= 1e-2);
    }
  }
  CHECK(covered > 200000);
}

TEST_CASE("z-buffer keeps the nearer of coincident footprints") {
  const Eigen::Vector2d a(100.3, 80.2), b(500.7, 120.9), c(300.1, 400.6);
  for (bool near_first : {true, false}) {
    TriangleMesh m;
    for (double z : near_first ? std::vector<double>{500, 1000} : std::vector<double>{1000, 500}) {
      const auto base = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back(Lift(kCam, a.x(), a.y(), z));
      m.vertices.push_back(Lift(kCam, b.x(), b.y(), z));
      m.vertices.push_back(Lift(kCam, c.x(), c.y(), z));
      m.triangles.push_back({base, base + 1, base + 2});
    }
    const DepthImage d = RenderDepthOnly(m, RigidTransform::Identity(), kCam);
    std::size_t shared = 0;
    for (float z : d.data) {
      if (!IsValidDepth(z)) continue;
      ++shared;
      CHECK(std::abs(z - 500.0f) <= 1e-3f);
    }
    CHECK(shared > 1000);
  }
}

TEST_CASE("shared edges are covered exactly once") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 640.0), v(0.0, 480.0);
  for (int trial = 0; trial < 50; ++trial) {
    // Quad split along a diagonal, plus a fan around an interior vertex.
    const Eigen::Vector3d p0 = Lift(kCam, u(rng), v(rng), 700), p1 = Lift(kCam, u(rng), v(rng), 700),
                          p2 = Lift(kCam, u(rng), v(rng), 700);
    const Eigen::Vector3d center = (p0 + p1 + p2) / 3.0;
    Image<int> count(640, 480);
    for (auto tri : {std::array{p0, p1, center}, std::array{p1, p2, center}, std::array{p2, p0, center}}) {
      const DepthImage d = RenderDepthOnly(OneTriangle(tri[0], tri[1], tri[2]), RigidTransform::Identity(), kCam);
      for (std::size_t i = 0; i < d.size(); ++i) count.data[i] += IsValidDepth(d.data[i]);
    }
    const DepthImage whole = RenderDepthOnly(OneTriangle(p0, p1, p2), RigidTransform::Identity(), kCam);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      CHECK(count.data[i] <= 1);
      CHECK((count.data[i] == 1) == IsValidDepth(whole.data[i]));
    }
  }
}

TEST_CASE("closed mesh silhouette has no holes") {
  const TriangleMesh mesh = MakeSuperellipsoid();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    RigidTransform pose;
    pose.rotation = testutil::RandomRotation(rng);
    pose.translation = {0, 0, 300};
    const DepthImage d = RenderDepthOnly(mesh, pose, kCam);
    // Every 4-neighbor of an interior valid pixel is valid except at the silhouette;
    // holes show up as invalid pixels with all four neighbors valid.
    for (int y = 1; y + 1 < kCam.height; ++y) {
      for (int x = 1; x + 1 < kCam.width; ++x) {
        if (IsValidDepth(d.at(x, y))) continue;
        const bool enclosed = IsValidDepth(d.at(x - 1, y)) && IsValidDepth(d.at(x + 1, y)) &&
                              IsValidDepth(d.at(x, y - 1)) && IsValidDepth(d.at(x, y + 1));
        CHECK_FALSE(enclosed);
      }
    }
  }
}

TEST_CASE("depth-only equals the depth channel bit for bit") {
  const TriangleMesh mesh = MakeAxialMotor();
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    RigidTransform pose;
    pose.rotation = testutil::RandomRotation(rng);
    pose.translation = {0, 0, 250};
    const RgbdFrame f = RenderRgbd(mesh, pose, kCam);
    const DepthImage d = RenderDepthOnly(mesh, pose, kCam);
    CHECK(std::memcmp(f.depth.data.data(), d.data.data(), d.size() * sizeof(float)) == 0);
    CHECK(RenderRgbd(mesh, pose, kCam).color == f.color);  // determinism
  }
}

TEST_CASE("pose equivariance") {
  const TriangleMesh mesh = MakeSuperellipsoid();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    RigidTransform pose;
    pose.rotation = testutil::RandomRotation(rng);
    pose.translation = {10, -5, 350};
    TriangleMesh moved = mesh;
    for (auto &v : moved.vertices) v = pose.Apply(v);
    const RgbdFrame a = RenderRgbd(mesh, pose, kCam);
    const RgbdFrame b = RenderRgbd(moved, RigidTransform::Identity(), kCam);
    CHECK(a.depth == b.depth);
    CHECK(a.color == b.color);
  }
}

TEST_CASE("behind the camera and near-plane clipping") {
  const TriangleMesh behind = OneTriangle({-10, -10, -5}, {10, -10, -5}, {0, 10, -1});
  for (float d : RenderDepthOnly(behind, RigidTransform::Identity(), kCam).data) {
    CHECK_FALSE(IsValidDepth(d));
  }
  // Straddles z = 0: only the part beyond the near plane is drawn.
  const TriangleMesh straddle = OneTriangle({-50, -50, -100}, {50, -50, 300}, {0, 60, 300});
  const DepthImage d = RenderDepthOnly(straddle, RigidTransform::Identity(), kCam);
  std::size_t valid = 0;
  for (float z : d.data) {
    if (!IsValidDepth(z)) continue;
    ++valid;
    CHECK(z >= 1.0f - 1e-4f);
  }
  CHECK(valid > 0);
}

TEST_CASE("colors and culling") {
  TriangleMesh m = OneTriangle(Lift(kCam, 100, 100, 500), Lift(kCam, 300, 100, 500),
                               Lift(kCam, 200, 300, 500));
  RgbdFrame f = RenderRgbd(m, RigidTransform::Identity(), kCam);
  CHECK(f.color.at(200, 150) == kUntexturedGray);
  m.vertex_colors.assign(3, Eigen::Vector3d(1.0, 0.5, 0.0));
  f = RenderRgbd(m, RigidTransform::Identity(), kCam);
  CHECK(f.color.at(200, 150) == Rgb8{255, 128, 0});

  // Winding seen from the camera decides what culling removes.
  const TriangleMesh flipped = OneTriangle(m.vertices[0], m.vertices[2], m.vertices[1]);
  RenderOptions cull;
  cull.cull_back_faces = true;
  const DepthImage da = RenderDepthOnly(m, {}, kCam, cull);
  const std::size_t a = std::count_if(da.data.begin(), da.data.end(), IsValidDepth);
  const DepthImage db = RenderDepthOnly(flipped, {}, kCam, cull);
  const std::size_t b = std::count_if(db.data.begin(), db.data.end(), IsValidDepth);
  CHECK(((a == 0) != (b == 0)));
}

TEST_CASE("depth png round trip") {
  const std::string dir = testutil::ScratchDir("depth_png");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> z(0.0f, 6500.0f);
  RgbdFrame f;
  f.intrinsics = {100, 100, 32, 24, 64, 48};
  f.depth = DepthImage(64, 48);
  f.color = ColorImage(64, 48, Rgb8{1, 2, 3});
  for (auto &d : f.depth.data) d = z(rng);
  f.depth.at(3, 3) = 0.0f;
  f.depth.at(4, 4) = std::numeric_limits<float>::infinity();
  WriteFrame(f, 0.1, dir + "/c.png", dir + "/d.png");
  const DepthImage back = ReadDepthPng(dir + "/d.png", 0.1);
  CHECK(ReadPngRgb(dir + "/c.png") == f.color);
  for (std::size_t i = 0; i < back.size(); ++i) {
    if (IsValidDepth(f.depth.data[i]) && f.depth.data[i] >= 0.05f) {
      // Half a quantum plus the float spacing of the stored value.
      CHECK(std::abs(back.data[i] - f.depth.data[i]) <= 0.05f + 5e-4f);
    }
  }
  CHECK_FALSE(IsValidDepth(back.at(3, 3)));
  CHECK_FALSE(IsValidDepth(back.at(4, 4)));

  f.depth.at(0, 0) = 70000.0f;
  CHECK_THROWS_AS(WriteFrame(f, 0.1, dir + "/c.png", dir + "/d.png"), ValidationError);
  CHECK_THROWS_AS(WriteFrame(f, 0.0, dir + "/c.png", dir + "/d.png"), ValidationError);
  f.depth.at(0, 0) = 1.0f;
  CHECK_THROWS_AS(WriteFrame(f, 0.1, dir + "/no/such/dir/c.png", dir + "/d.png"), IoError);
}

}  // TEST_SUITE
