#pragma once

#include <Eigen/Core>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/image.hpp"
#include "dtinspect/rle.hpp"

namespace dtinspect {

enum class Supercategory { kLogical, kStructural };

const char *ToString(Supercategory s);
Supercategory SupercategoryFromString(const std::string &s);

struct DefectCategory {
  int id = 0;
  std::string name;
  Supercategory supercategory = Supercategory::kLogical;
  friend bool operator==(const DefectCategory &, const DefectCategory &) = default;
};

/// logical: existence, position, type, color; structural: deformation, crack.
std::vector<DefectCategory> BuiltinTaxonomy();

/// Vertices in pixel coordinates; pixel (x, y) covers [x, x+1) x [y, y+1).
using Polygon = std::vector<Eigen::Vector2d>;

struct DefectAnnotation {
  int id = 0;
  int image_id = 0;
  int category_id = 0;
  std::vector<Polygon> polygons;  // logical defects
  std::optional<Rle> mask;        // structural defects
  double area = 0.0;              // px
  std::array<double, 4> bbox{};   // x, y, w, h in px
  friend bool operator==(const DefectAnnotation &, const DefectAnnotation &) = default;
};

struct ImageRecord {
  int id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageRecord &, const ImageRecord &) = default;
};

/// COCO triple stored in defects.json.
struct DefectFile {
  std::vector<ImageRecord> images;
  std::vector<DefectCategory> categories;
  std::vector<DefectAnnotation> annotations;
  friend bool operator==(const DefectFile &, const DefectFile &) = default;

  const DefectCategory *FindCategory(int id) const;
  const DefectCategory *FindCategory(const std::string &name) const;
};

struct CameraRecord {
  CameraIntrinsics intrinsics;
  double depth_scale = 0.1;  // mm per stored unit
  friend bool operator==(const CameraRecord &, const CameraRecord &) = default;
};

struct FramePoseRecord {
  int obj_id = 1;
  RigidTransform pose;  // cam_R_m2c, cam_t_m2c
};

bool operator==(const FramePoseRecord &a, const FramePoseRecord &b);

struct Scene {
  std::string id;  // directory name under the dataset root
  std::map<int, CameraRecord> cameras;                   // scene_camera.json
  std::map<int, std::vector<FramePoseRecord>> poses;     // scene_gt.json
  DefectFile defects;                                    // defects.json
  friend bool operator==(const Scene &, const Scene &) = default;
};

struct SceneDataset {
  std::vector<Scene> scenes;
  friend bool operator==(const SceneDataset &, const SceneDataset &) = default;

  const Scene *FindScene(const std::string &id) const;
};

/// <root>/<scene>/rgb/<frame:06d>.png and .../depth/<frame:06d>.png
std::string RgbPath(const std::string &root, const std::string &scene, int frame_id);
std::string DepthPath(const std::string &root, const std::string &scene, int frame_id);

/// Reads every scene directory under root and validates it, including the
/// presence of the referenced image files.
SceneDataset ReadDataset(const std::string &root);
/// Writes the JSON records of every scene (images are written separately).
void WriteDataset(const SceneDataset &ds, const std::string &root);

/// Structural checks independent of the file system. `where` prefixes errors.
void ValidateScene(const Scene &scene, const std::string &where);

/// Even-odd fill sampled at pixel centers. Throws on fewer than 3 vertices
/// or zero area.
BinaryMask PolygonToMask(const Polygon &polygon, int width, int height);
/// Even-odd fill over all rings together (holes are inner rings).
BinaryMask PolygonsToMask(const std::vector<Polygon> &rings, int width, int height);
/// Closed rings along pixel borders whose even-odd fill reproduces the mask.
std::vector<Polygon> MaskToPolygons(const BinaryMask &mask);
double ShoelaceArea(const Polygon &polygon);

/// Ground-truth mask of one annotation (polygons rasterized, RLE decoded).
BinaryMask AnnotationMask(const DefectAnnotation &annotation, int width, int height);

/// Builds an annotation of the right segmentation kind for the category.
DefectAnnotation MakeAnnotation(int id, int image_id, const DefectCategory &category,
                                const BinaryMask &mask);

struct CountSummary {
  std::size_t images = 0;
  std::size_t structural_images = 0;
  std::size_t logical_images = 0;
  std::size_t structural_annotations = 0;
  std::size_t logical_annotations = 0;
  std::map<std::string, std::size_t> per_category;
  /// (scene, image id) pairs carrying more than one logical annotation.
  std::vector<std::pair<std::string, int>> multi_logical_images;
};

CountSummary ValidateCounts(const SceneDataset &ds);

}  // namespace dtinspect
