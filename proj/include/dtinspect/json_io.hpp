#pragma once

// JSON encodings shared by the dataset files, the CLI and the reports.

#include <json.hpp>
#include <string>

#include "dtinspect/annotations.hpp"
#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/rle.hpp"

namespace dtinspect {

using Json = nlohmann::ordered_json;

/// {"cam_R_m2c": [9 row-major], "cam_t_m2c": [3]}
Json PoseToJson(const RigidTransform &t);
RigidTransform PoseFromJson(const Json &j, const std::string &where);

/// {"cam_K": [9 row-major], "depth_scale": s, "width": w, "height": h}
Json CameraToJson(const CameraRecord &c);
CameraRecord CameraFromJson(const Json &j, const std::string &where);

/// {"size": [h, w], "counts": [...]}
Json RleToJson(const Rle &rle);
Rle RleFromJson(const Json &j, const std::string &where);

Json DefectFileToJson(const DefectFile &f);
DefectFile DefectFileFromJson(const Json &j, const std::string &where);

/// scene_gt.json / scene_camera.json bodies.
Json SceneGtToJson(const std::map<int, std::vector<FramePoseRecord>> &poses);
std::map<int, std::vector<FramePoseRecord>> SceneGtFromJson(const Json &j, const std::string &where);
Json SceneCameraToJson(const std::map<int, CameraRecord> &cams);
std::map<int, CameraRecord> SceneCameraFromJson(const Json &j, const std::string &where);

Json ReadJsonFile(const std::string &path);
void WriteJsonFile(const Json &j, const std::string &path);

}  // namespace dtinspect
