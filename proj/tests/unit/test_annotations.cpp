#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "dtinspect/annotations.hpp"
#include "dtinspect/defect.hpp"
#include "dtinspect/error.hpp"
#include "dtinspect/json_io.hpp"
#include "dtinspect/png_io.hpp"
#include "dtinspect/rle.hpp"
#include "test_util.hpp"

using namespace dtinspect;
namespace fs = std::filesystem;

namespace {

// Crossing-number point-in-polygon at the pixel center.
bool PointInPolygon(const Polygon &poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto &a = poly[i], &b = poly[j];
    if ((a.y() > y) != (b.y() > y) && x < (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x()) in = !in;
  }
  return in;
}

BinaryMask RandomMask(std::mt19937 &rng, int w, int h, int density) {
  BinaryMask m(w, h);
  for (auto &b : m.data) b = static_cast<int>(rng() % 100) < density;
  return m;
}

DefectCategory Category(const std::string &name) {
  for (const auto &c : BuiltinTaxonomy())
    if (c.name == name) return c;
  FAIL("no builtin category " << name);
  return {};
}

CameraRecord Camera(int w, int h) {
  CameraRecord c;
  c.intrinsics = {300, 300, w / 2.0, h / 2.0, w, h};
  return c;
}

RigidTransform SomePose(int i) {
  RigidTransform t;
  t.rotation = testutil::RotZ(7.0 * i);
  t.translation = {1.0 * i, -2.0, 400.0};
  return t;
}

Scene TwoFrameScene() {
  Scene s;
  s.id = "000003";
  s.defects.categories = BuiltinTaxonomy();
  for (int f = 0; f < 2; ++f) {
    s.cameras[f] = Camera(40, 30);
    s.poses[f] = {FramePoseRecord{1, SomePose(f)}};
    s.defects.images.push_back({f, "rgb/" + std::string(5, '0') + std::to_string(f) + ".png", 40, 30});
  }
  BinaryMask crack(40, 30), missing(40, 30);
  for (int x = 5; x < 25; ++x) crack.at(x, 10 + x % 3) = 1;
  for (int y = 4; y < 12; ++y)
    for (int x = 20; x < 31; ++x) missing.at(x, y) = 1;
  missing.at(25, 8) = 0;  // a hole
  s.defects.annotations.push_back(MakeAnnotation(1, 0, Category("crack"), crack));
  s.defects.annotations.push_back(MakeAnnotation(2, 1, Category("existence"), missing));
  return s;
}

void WriteImages(const Scene &s, const std::string &root) {
  for (const auto &im : s.defects.images) {
    fs::create_directories(fs::path(RgbPath(root, s.id, im.id)).parent_path());
    fs::create_directories(fs::path(DepthPath(root, s.id, im.id)).parent_path());
    WritePngRgb(ColorImage(im.width, im.height), RgbPath(root, s.id, im.id));
    WritePngGray16(Image<std::uint16_t>(im.width, im.height), DepthPath(root, s.id, im.id));
  }
}

}  // namespace

TEST_SUITE("annotations") {

TEST_CASE("rle examples") {
  const Rle empty = RleEncode(BinaryMask(4, 3));
  CHECK(empty.counts == std::vector<std::uint32_t>{12});
  const Rle full = RleEncode(BinaryMask(4, 3, 1));
  CHECK(full.counts == std::vector<std::uint32_t>{0, 12});
  // Column-major: pixel (1, 0) is the fourth sample.
  BinaryMask m(4, 3);
  m.at(1, 0) = 1;
  m.at(1, 1) = 1;
  CHECK(RleEncode(m).counts == std::vector<std::uint32_t>{3, 2, 7});
  CHECK(RleArea(RleEncode(m)) == 2);
  Rle bad{4, 3, {3, 2}};
  CHECK_THROWS_AS(RleDecode(bad), ValidationError);
}

TEST_CASE("rle round trips random masks") {
  std::mt19937 rng(10);
  for (int i = 0; i < 1000; ++i) {
    const BinaryMask m = RandomMask(rng, 1 + rng() % 40, 1 + rng() % 30, rng() % 101);
    const Rle r = RleEncode(m);
    CHECK(RleDecode(r) == m);
    CHECK(RleFromJson(RleToJson(r), "t") == r);
  }
}

TEST_CASE("polygon fill examples") {
  const Polygon rect{{0.5, 0.5}, {10.5, 0.5}, {10.5, 5.5}, {0.5, 5.5}};
  const BinaryMask m = PolygonToMask(rect, 20, 20);
  CHECK(CountSet(m) == 50);
  // Centers on the lower edges are inside, on the upper edges outside.
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(9, 4) == 1);
  CHECK(m.at(10, 5) == 0);
  CHECK(m.at(10, 0) == 0);
  CHECK(CountSet(PolygonToMask({{-30, -30}, {-10, -30}, {-20, -5}}, 20, 20)) == 0);
  CHECK_THROWS_AS(PolygonToMask({{0, 0}, {1, 1}}, 5, 5), ValidationError);
  CHECK_THROWS_AS(PolygonToMask({{0, 0}, {1, 1}, {2, 2}}, 5, 5), ValidationError);
}

TEST_CASE("polygon fill agrees with the exhaustive oracle and shoelace bound") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5, 65);
  for (int trial = 0; trial < 300; ++trial) {
    Polygon poly;
    const int n = 3 + trial % 7;
    for (int i = 0; i < n; ++i) poly.emplace_back(u(rng), u(rng));
    if (std::abs(ShoelaceArea(poly)) < 1e-6) continue;
    const BinaryMask m = PolygonToMask(poly, 60, 50);
    for (int y = 0; y < 50; ++y)
      for (int x = 0; x < 60; ++x) CHECK(m.at(x, y) == PointInPolygon(poly, x + 0.5, y + 0.5));
  }
  // Convex polygons: pixel count within one perimeter of the area.
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d c(20 + u(rng) / 3, 20 + u(rng) / 3);
    const double r = 3 + std::abs(u(rng)) / 4;
    const int n = 3 + trial % 10;
    Polygon poly;
    double perimeter = 0;
    for (int i = 0; i < n; ++i) {
      const double a = 2 * M_PI * i / n + 0.3 * trial;
      poly.push_back(c + r * Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
    for (int i = 0; i < n; ++i) perimeter += (poly[(i + 1) % n] - poly[i]).norm();
    const double pixels = CountSet(PolygonToMask(poly, 80, 80));
    CHECK(std::abs(pixels - std::abs(ShoelaceArea(poly))) <= perimeter);
  }
}

TEST_CASE("mask to polygons reproduces the mask") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask m = RandomMask(rng, 3 + rng() % 25, 3 + rng() % 25, 20 + rng() % 60);
    const auto rings = MaskToPolygons(m);
    if (CountSet(m) == 0) {
      CHECK(rings.empty());
      continue;
    }
    CHECK(PolygonsToMask(rings, m.width, m.height) == m);
  }
}

TEST_CASE("json records round trip") {
  const RigidTransform t = SomePose(3);
  const RigidTransform back = PoseFromJson(PoseToJson(t), "pose");
  CHECK((back.rotation - t.rotation).norm() < 1e-12);
  CHECK(back.translation == t.translation);
  const CameraRecord c = Camera(64, 48);
  CHECK(CameraFromJson(CameraToJson(c), "cam") == c);
  Json bad = PoseToJson(t);
  bad["cam_R_m2c"][0] = 5.0;
  CHECK_THROWS_AS(PoseFromJson(bad, "pose"), ValidationError);
  bad.erase("cam_t_m2c");
  try {
    PoseFromJson(bad, "pose");
    FAIL("expected an error");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("cam_t_m2c") != std::string::npos);
  }
}

TEST_CASE("dataset write then read is value-identical") {
  const std::string root = testutil::ScratchDir("dataset_rt");
  SceneDataset ds;
  ds.scenes.push_back(TwoFrameScene());
  WriteDataset(ds, root);
  WriteImages(ds.scenes[0], root);
  const SceneDataset back = ReadDataset(root);
  CHECK(back == ds);
  const auto &ann = back.scenes[0].defects.annotations;
  CHECK(ann[0].mask.has_value());
  CHECK(ann[1].polygons.size() == 2);
  CHECK(CountSet(AnnotationMask(ann[1], 40, 30)) == 87);
}

TEST_CASE("dataset validation errors") {
  Scene s = TwoFrameScene();
  Scene dangling = s;
  dangling.defects.annotations[0].image_id = 7;
  try {
    ValidateScene(dangling, "scene");
    FAIL("expected an error");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("image_id 7") != std::string::npos);
  }
  Scene mismatch = s;
  mismatch.defects.annotations[0].polygons = {{{1, 1}, {5, 1}, {5, 5}}};
  mismatch.defects.annotations[0].mask.reset();
  CHECK_THROWS_WITH_AS(ValidateScene(mismatch, "scene"), doctest::Contains("category/segmentation mismatch"),
                       ValidationError);
  Scene poseless = s;
  poseless.poses.erase(1);
  CHECK_THROWS_WITH_AS(ValidateScene(poseless, "scene"), doctest::Contains("no pose record"), ValidationError);
  Scene outside = s;
  outside.defects.annotations[1].polygons[0][0] = {41, 2};
  CHECK_THROWS_AS(ValidateScene(outside, "scene"), ValidationError);

  const std::string root = testutil::ScratchDir("dataset_missing");
  SceneDataset ds;
  ds.scenes.push_back(s);
  WriteDataset(ds, root);
  CHECK_THROWS_AS(ReadDataset(root), IoError);  // images absent
  CHECK_THROWS_AS(ReadDataset(root + "/nope"), IoError);
}

TEST_CASE("taxonomy") {
  const auto tax = BuiltinTaxonomy();
  std::set<std::string> logical, structural;
  std::set<int> ids;
  for (const auto &c : tax) {
    CHECK(ids.insert(c.id).second);
    (c.supercategory == Supercategory::kLogical ? logical : structural).insert(c.name);
  }
  CHECK(logical == std::set<std::string>{"existence", "position", "type", "color"});
  CHECK(structural == std::set<std::string>{"deformation", "crack"});
  CHECK(SupercategoryFromString(ToString(Supercategory::kStructural)) == Supercategory::kStructural);
}

TEST_CASE("count summary") {
  CHECK(ValidateCounts(SceneDataset{}).images == 0);
  CHECK(ValidateCounts(SceneDataset{}).logical_annotations == 0);

  // 85 images: 48 with structural defects, 37 with logical ones, four of
  // which carry a second logical annotation.
  Scene s;
  s.id = "000000";
  s.defects.categories = BuiltinTaxonomy();
  BinaryMask blob(16, 12);
  for (int y = 2; y < 6; ++y)
    for (int x = 3; x < 9; ++x) blob.at(x, y) = 1;
  int next = 1;
  const char *structural[] = {"deformation", "crack"};
  const char *logical[] = {"existence", "position", "type", "color"};
  for (int f = 0; f < 85; ++f) {
    s.cameras[f] = Camera(16, 12);
    s.poses[f] = {FramePoseRecord{1, SomePose(f)}};
    s.defects.images.push_back({f, "x.png", 16, 12});
    if (f < 48) {
      s.defects.annotations.push_back(MakeAnnotation(next++, f, Category(structural[f % 2]), blob));
    } else {
      s.defects.annotations.push_back(MakeAnnotation(next++, f, Category(logical[f % 4]), blob));
      if (f % 9 == 0) s.defects.annotations.push_back(MakeAnnotation(next++, f, Category("existence"), blob));
    }
  }
  CHECK_NOTHROW(ValidateScene(s, "fixture"));
  SceneDataset ds;
  ds.scenes.push_back(s);
  const CountSummary c = ValidateCounts(ds);
  CHECK(c.images == 85);
  CHECK(c.structural_images == 48);
  CHECK(c.logical_images == 37);
  CHECK(c.logical_annotations == 41);
  CHECK(c.structural_annotations == 48);
  CHECK(c.multi_logical_images.size() == 4);

  // Three logical annotations on one image are flagged once.
  s.defects.annotations.push_back(MakeAnnotation(next++, 54, Category("type"), blob));
  ds.scenes[0] = s;
  CHECK(ValidateCounts(ds).multi_logical_images.size() == 4);
}

}  // TEST_SUITE
