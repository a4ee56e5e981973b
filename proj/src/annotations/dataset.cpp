#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dtinspect/annotations.hpp"
#include "dtinspect/json_io.hpp"

namespace fs = std::filesystem;

namespace dtinspect {

namespace {

const Json &Field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing key '" + key + "'");
  return *it;
}

double Number(const Json &j, const char *key, const std::string &where) {
  const Json &v = Field(j, key, where);
  if (!v.is_number()) throw ValidationError(where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

int Integer(const Json &j, const char *key, const std::string &where) {
  const Json &v = Field(j, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(where + ": key '" + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string Text(const Json &j, const char *key, const std::string &where) {
  const Json &v = Field(j, key, where);
  if (!v.is_string()) throw ValidationError(where + ": key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> Numbers(const Json &j, const char *key, std::size_t n,
                            const std::string &where) {
  const Json &v = Field(j, key, where);
  if (!v.is_array() || (n != 0 && v.size() != n)) {
    throw ValidationError(where + ": key '" + key + "' must be an array of " +
                          std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const Json &e : v) {
    if (!e.is_number()) throw ValidationError(where + ": key '" + key + "' holds a non-number");
    out.push_back(e.get<double>());
  }
  return out;
}

int FrameKey(const std::string &key, const std::string &where) {
  std::size_t used = 0;
  int id = -1;
  try {
    id = std::stoi(key, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != key.size() || id < 0) {
    throw ValidationError(where + ": frame key '" + key + "' is not a non-negative integer");
  }
  return id;
}

std::string FrameName(int frame_id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d.png", frame_id);
  return buf;
}

}  // namespace

const char *ToString(Supercategory s) {
  return s == Supercategory::kLogical ? "logical" : "structural";
}

Supercategory SupercategoryFromString(const std::string &s) {
  if (s == "logical") return Supercategory::kLogical;
  if (s == "structural") return Supercategory::kStructural;
  throw ValidationError("unknown supercategory '" + s + "'");
}

std::vector<DefectCategory> BuiltinTaxonomy() {
  return {{1, "existence", Supercategory::kLogical},  {2, "position", Supercategory::kLogical},
          {3, "type", Supercategory::kLogical},       {4, "color", Supercategory::kLogical},
          {5, "deformation", Supercategory::kStructural}, {6, "crack", Supercategory::kStructural}};
}

const DefectCategory *DefectFile::FindCategory(int id) const {
  for (const auto &c : categories)
    if (c.id == id) return &c;
  return nullptr;
}

const DefectCategory *DefectFile::FindCategory(const std::string &name) const {
  for (const auto &c : categories)
    if (c.name == name) return &c;
  return nullptr;
}

bool operator==(const FramePoseRecord &a, const FramePoseRecord &b) {
  return a.obj_id == b.obj_id && a.pose.rotation == b.pose.rotation &&
         a.pose.translation == b.pose.translation;
}

const Scene *SceneDataset::FindScene(const std::string &id) const {
  for (const auto &s : scenes)
    if (s.id == id) return &s;
  return nullptr;
}

std::string RgbPath(const std::string &root, const std::string &scene, int frame_id) {
  return (fs::path(root) / scene / "rgb" / FrameName(frame_id)).string();
}

std::string DepthPath(const std::string &root, const std::string &scene, int frame_id) {
  return (fs::path(root) / scene / "depth" / FrameName(frame_id)).string();
}

// ---- JSON records ----------------------------------------------------------

Json PoseToJson(const RigidTransform &t) {
  Json r = Json::array(), tr = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(t.rotation(i, k));
  for (int i = 0; i < 3; ++i) tr.push_back(t.translation(i));
  Json j;
  j["cam_R_m2c"] = r;
  j["cam_t_m2c"] = tr;
  return j;
}

RigidTransform PoseFromJson(const Json &j, const std::string &where) {
  const auto r = Numbers(j, "cam_R_m2c", 9, where);
  const auto t = Numbers(j, "cam_t_m2c", 3, where);
  RigidTransform pose;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) pose.rotation(i, k) = r[3 * i + k];
  pose.translation = Eigen::Vector3d(t[0], t[1], t[2]);
  if (!IsValid(pose)) throw ValidationError(where + ": cam_R_m2c is not a rotation matrix");
  return pose;
}

Json CameraToJson(const CameraRecord &c) {
  const auto &k = c.intrinsics;
  Json j;
  j["cam_K"] = {k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0};
  j["depth_scale"] = c.depth_scale;
  j["width"] = k.width;
  j["height"] = k.height;
  return j;
}

CameraRecord CameraFromJson(const Json &j, const std::string &where) {
  const auto m = Numbers(j, "cam_K", 9, where);
  CameraRecord c;
  c.intrinsics.fx = m[0];
  c.intrinsics.cx = m[2];
  c.intrinsics.fy = m[4];
  c.intrinsics.cy = m[5];
  c.intrinsics.width = Integer(j, "width", where);
  c.intrinsics.height = Integer(j, "height", where);
  if (j.contains("depth_scale")) c.depth_scale = Number(j, "depth_scale", where);
  if (!(c.depth_scale > 0.0)) throw ValidationError(where + ": depth_scale must be positive");
  try {
    c.intrinsics.Validate();
  } catch (const ValidationError &e) {
    throw ValidationError(where + ": " + e.what());
  }
  return c;
}

Json RleToJson(const Rle &rle) {
  Json j;
  j["size"] = {rle.height, rle.width};
  j["counts"] = rle.counts;
  return j;
}

Rle RleFromJson(const Json &j, const std::string &where) {
  const auto size = Numbers(j, "size", 2, where);
  Rle rle;
  rle.height = static_cast<int>(size[0]);
  rle.width = static_cast<int>(size[1]);
  const Json &counts = Field(j, "counts", where);
  if (!counts.is_array()) {
    throw ValidationError(where + ": 'counts' must be an array (compressed RLE unsupported)");
  }
  for (const Json &c : counts) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0)) {
      throw ValidationError(where + ": RLE counts must be non-negative integers");
    }
    rle.counts.push_back(c.get<std::uint32_t>());
  }
  std::uint64_t total = 0;
  for (auto c : rle.counts) total += c;
  if (total != static_cast<std::uint64_t>(rle.width) * rle.height) {
    throw ValidationError(where + ": RLE runs sum to " + std::to_string(total) +
                          ", expected " + std::to_string(rle.width * rle.height));
  }
  return rle;
}

Json DefectFileToJson(const DefectFile &f) {
  Json j;
  j["images"] = Json::array();
  for (const auto &im : f.images) {
    j["images"].push_back(
        {{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
  }
  j["categories"] = Json::array();
  for (const auto &c : f.categories) {
    j["categories"].push_back(
        {{"id", c.id}, {"name", c.name}, {"supercategory", ToString(c.supercategory)}});
  }
  j["annotations"] = Json::array();
  for (const auto &a : f.annotations) {
    Json aj;
    aj["id"] = a.id;
    aj["image_id"] = a.image_id;
    aj["category_id"] = a.category_id;
    if (a.mask) {
      aj["segmentation"] = RleToJson(*a.mask);
      aj["iscrowd"] = 1;
    } else {
      Json rings = Json::array();
      for (const auto &poly : a.polygons) {
        Json flat = Json::array();
        for (const auto &v : poly) {
          flat.push_back(v.x());
          flat.push_back(v.y());
        }
        rings.push_back(flat);
      }
      aj["segmentation"] = rings;
      aj["iscrowd"] = 0;
    }
    aj["area"] = a.area;
    aj["bbox"] = a.bbox;
    j["annotations"].push_back(aj);
  }
  return j;
}

DefectFile DefectFileFromJson(const Json &j, const std::string &where) {
  DefectFile f;
  for (const Json &im : Field(j, "images", where)) {
    const std::string w = where + ": image";
    f.images.push_back({Integer(im, "id", w), Text(im, "file_name", w), Integer(im, "width", w),
                        Integer(im, "height", w)});
  }
  for (const Json &c : Field(j, "categories", where)) {
    const std::string w = where + ": category";
    try {
      f.categories.push_back({Integer(c, "id", w), Text(c, "name", w),
                              SupercategoryFromString(Text(c, "supercategory", w))});
    } catch (const ValidationError &e) {
      if (std::string(e.what()).rfind(where, 0) == 0) throw;
      throw ValidationError(w + ": " + e.what());
    }
  }
  for (const Json &a : Field(j, "annotations", where)) {
    DefectAnnotation ann;
    ann.id = Integer(a, "id", where + ": annotation");
    const std::string w = where + ": annotation " + std::to_string(ann.id);
    ann.image_id = Integer(a, "image_id", w);
    ann.category_id = Integer(a, "category_id", w);
    const Json &seg = Field(a, "segmentation", w);
    if (seg.is_object()) {
      ann.mask = RleFromJson(seg, w);
    } else if (seg.is_array()) {
      for (const Json &ring : seg) {
        if (!ring.is_array() || ring.size() % 2 != 0) {
          throw ValidationError(w + ": polygon must be a flat list of x,y pairs");
        }
        Polygon poly;
        for (std::size_t i = 0; i < ring.size(); i += 2) {
          if (!ring[i].is_number() || !ring[i + 1].is_number()) {
            throw ValidationError(w + ": polygon holds a non-number");
          }
          poly.emplace_back(ring[i].get<double>(), ring[i + 1].get<double>());
        }
        ann.polygons.push_back(std::move(poly));
      }
    } else {
      throw ValidationError(w + ": 'segmentation' must be a polygon list or an RLE object");
    }
    ann.area = Number(a, "area", w);
    const auto bbox = Numbers(a, "bbox", 4, w);
    std::copy(bbox.begin(), bbox.end(), ann.bbox.begin());
    f.annotations.push_back(std::move(ann));
  }
  return f;
}

Json SceneGtToJson(const std::map<int, std::vector<FramePoseRecord>> &poses) {
  Json j = Json::object();
  for (const auto &[frame, records] : poses) {
    Json list = Json::array();
    for (const auto &r : records) {
      Json e;
      e["obj_id"] = r.obj_id;
      Json p = PoseToJson(r.pose);
      e["cam_R_m2c"] = p["cam_R_m2c"];
      e["cam_t_m2c"] = p["cam_t_m2c"];
      list.push_back(e);
    }
    j[std::to_string(frame)] = list;
  }
  return j;
}

std::map<int, std::vector<FramePoseRecord>> SceneGtFromJson(const Json &j,
                                                            const std::string &where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object keyed by frame id");
  std::map<int, std::vector<FramePoseRecord>> out;
  for (const auto &[key, list] : j.items()) {
    const int frame = FrameKey(key, where);
    const std::string w = where + ": frame " + key;
    if (!list.is_array()) throw ValidationError(w + ": expected a list of pose records");
    auto &records = out[frame];
    for (const Json &e : list) {
      records.push_back({Integer(e, "obj_id", w), PoseFromJson(e, w)});
    }
  }
  return out;
}

Json SceneCameraToJson(const std::map<int, CameraRecord> &cams) {
  Json j = Json::object();
  for (const auto &[frame, c] : cams) j[std::to_string(frame)] = CameraToJson(c);
  return j;
}

std::map<int, CameraRecord> SceneCameraFromJson(const Json &j, const std::string &where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object keyed by frame id");
  std::map<int, CameraRecord> out;
  for (const auto &[key, value] : j.items()) {
    out[FrameKey(key, where)] = CameraFromJson(value, where + ": frame " + key);
  }
  return out;
}

Json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError(path + ": JSON parse error: " + e.what());
  }
}

void WriteJsonFile(const Json &j, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

// ---- dataset ---------------------------------------------------------------

void ValidateScene(const Scene &scene, const std::string &where) {
  std::set<int> category_ids;
  for (const auto &c : scene.defects.categories) {
    if (!category_ids.insert(c.id).second) {
      throw ValidationError(where + ": duplicate category id " + std::to_string(c.id));
    }
  }
  std::map<int, const ImageRecord *> images;
  for (const auto &im : scene.defects.images) {
    if (!images.emplace(im.id, &im).second) {
      throw ValidationError(where + ": duplicate image id " + std::to_string(im.id));
    }
    auto cam = scene.cameras.find(im.id);
    if (cam == scene.cameras.end()) {
      throw ValidationError(where + ": frame " + std::to_string(im.id) +
                            " has no scene_camera record");
    }
    if (cam->second.intrinsics.width != im.width || cam->second.intrinsics.height != im.height) {
      throw ValidationError(where + ": frame " + std::to_string(im.id) +
                            " image size disagrees with scene_camera");
    }
  }
  std::set<int> annotation_ids;
  for (const auto &a : scene.defects.annotations) {
    const std::string w = where + ": annotation " + std::to_string(a.id);
    if (!annotation_ids.insert(a.id).second) throw ValidationError(w + ": duplicate id");
    auto im = images.find(a.image_id);
    if (im == images.end()) {
      throw ValidationError(w + ": image_id " + std::to_string(a.image_id) +
                            " does not resolve to a frame");
    }
    const DefectCategory *cat = scene.defects.FindCategory(a.category_id);
    if (!cat) {
      throw ValidationError(w + ": unknown category_id " + std::to_string(a.category_id));
    }
    const std::string wf = w + " (frame " + std::to_string(a.image_id) + ")";
    if (cat->supercategory == Supercategory::kLogical) {
      if (a.mask || a.polygons.empty()) {
        throw ValidationError(wf + ": category/segmentation mismatch: logical category '" +
                              cat->name + "' requires a polygon");
      }
      for (const auto &poly : a.polygons) {
        if (poly.size() < 3) throw ValidationError(wf + ": polygon has fewer than 3 vertices");
        for (const auto &v : poly) {
          if (!(v.x() >= 0.0 && v.y() >= 0.0 && v.x() <= im->second->width &&
                v.y() <= im->second->height)) {
            throw ValidationError(wf + ": polygon vertex outside image bounds");
          }
        }
      }
    } else {
      if (!a.mask || !a.polygons.empty()) {
        throw ValidationError(wf + ": category/segmentation mismatch: structural category '" +
                              cat->name + "' requires an RLE mask");
      }
      if (a.mask->width != im->second->width || a.mask->height != im->second->height) {
        throw ValidationError(wf + ": RLE size does not match the image");
      }
    }
    if (!scene.poses.count(a.image_id) || scene.poses.at(a.image_id).empty()) {
      throw ValidationError(wf + ": frame with defects has no pose record");
    }
  }
}

SceneDataset ReadDataset(const std::string &root) {
  if (!fs::is_directory(root)) throw IoError("dataset root does not exist: " + root);
  std::vector<fs::path> dirs;
  for (const auto &e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / "scene_gt.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  SceneDataset ds;
  for (const auto &dir : dirs) {
    Scene scene;
    scene.id = dir.filename().string();
    const std::string gt = (dir / "scene_gt.json").string();
    const std::string cam = (dir / "scene_camera.json").string();
    const std::string def = (dir / "defects.json").string();
    for (const auto &p : {cam, def}) {
      if (!fs::exists(p)) throw IoError("missing file: " + p);
    }
    scene.poses = SceneGtFromJson(ReadJsonFile(gt), gt);
    scene.cameras = SceneCameraFromJson(ReadJsonFile(cam), cam);
    scene.defects = DefectFileFromJson(ReadJsonFile(def), def);
    ValidateScene(scene, dir.string());
    for (const auto &im : scene.defects.images) {
      for (const auto &p : {RgbPath(root, scene.id, im.id), DepthPath(root, scene.id, im.id)}) {
        if (!fs::exists(p)) {
          throw IoError("frame " + std::to_string(im.id) + ": missing image " + p);
        }
      }
    }
    ds.scenes.push_back(std::move(scene));
  }
  return ds;
}

void WriteDataset(const SceneDataset &ds, const std::string &root) {
  for (const auto &scene : ds.scenes) {
    ValidateScene(scene, scene.id);
    const fs::path dir = fs::path(root) / scene.id;
    std::error_code ec;
    fs::create_directories(dir / "rgb", ec);
    fs::create_directories(dir / "depth", ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    WriteJsonFile(SceneGtToJson(scene.poses), (dir / "scene_gt.json").string());
    WriteJsonFile(SceneCameraToJson(scene.cameras), (dir / "scene_camera.json").string());
    WriteJsonFile(DefectFileToJson(scene.defects), (dir / "defects.json").string());
  }
}

CountSummary ValidateCounts(const SceneDataset &ds) {
  CountSummary s;
  for (const auto &scene : ds.scenes) {
    s.images += scene.defects.images.size();
    std::map<int, std::size_t> logical_per_image;
    std::set<int> structural_images;
    for (const auto &a : scene.defects.annotations) {
      const DefectCategory *cat = scene.defects.FindCategory(a.category_id);
      if (!cat) continue;
      ++s.per_category[cat->name];
      if (cat->supercategory == Supercategory::kLogical) {
        ++s.logical_annotations;
        ++logical_per_image[a.image_id];
      } else {
        ++s.structural_annotations;
        structural_images.insert(a.image_id);
      }
    }
    s.structural_images += structural_images.size();
    s.logical_images += logical_per_image.size();
    for (const auto &[image, n] : logical_per_image) {
      if (n > 1) s.multi_logical_images.emplace_back(scene.id, image);
    }
  }
  return s;
}

}  // namespace dtinspect
