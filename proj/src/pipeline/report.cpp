#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

#include "dtinspect/error.hpp"
#include "dtinspect/pipeline.hpp"
#include "dtinspect/png_io.hpp"

namespace fs = std::filesystem;

namespace dtinspect {

namespace {

Json RegionJson(const DefectRegion &r) {
  Json j;
  j["channel"] = ToString(r.channel);
  j["bbox"] = {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h};
  j["area"] = r.area;
  j["centroid"] = {r.centroid.x(), r.centroid.y()};
  j["score"] = r.score;
  j["rle"] = RleToJson(r.pixels);
  return j;
}

Json StatsJson(const ChannelStats &s) {
  return {{"valid_pixels", s.valid_pixels}, {"flagged_pixels", s.flagged_pixels},
          {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}, {"max", s.max}};
}

BinaryMask MaskFromRegions(const Json &regions, int width, int height, const std::string &where) {
  BinaryMask mask(width, height);
  if (!regions.is_array()) throw ValidationError(where + ": regions must be an array");
  for (const Json &r : regions) {
    if (!r.contains("rle")) throw ValidationError(where + ": region without 'rle'");
    const BinaryMask m = RleDecode(RleFromJson(r["rle"], where));
    RequireSameShape(m, mask, where.c_str());
    for (std::size_t i = 0; i < m.size(); ++i) mask.data[i] |= m.data[i];
  }
  return mask;
}

Gray8Image ToPng8(const BinaryMask &mask) {
  Gray8Image out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.size(); ++i) out.data[i] = mask.data[i] ? 255 : 0;
  return out;
}

}  // namespace

Json InspectionReportJson(const InspectionReport &report, int width, int height) {
  Json j;
  j["scene_id"] = report.scene_id;
  j["frame_id"] = report.frame_id;
  j["width"] = width;
  j["height"] = height;
  j["pose_used"] = PoseToJson(report.pose_used);
  if (report.icp) {
    const IcpResult &r = report.icp->result;
    Json icp;
    icp["applied"] = report.icp->applied;
    icp["method"] = ToString(r.method_used);
    icp["converged"] = r.converged;
    icp["iterations"] = r.iterations;
    icp["rmse_mm"] = r.rmse;
    icp["correspondences"] = r.correspondence_count;
    icp["diagnostic"] = r.diagnostic;
    icp["refined_pose"] = PoseToJson(r.refined_pose);
    j["icp"] = icp;
  } else {
    j["icp"] = nullptr;
  }
  j["params"] = {{"depth_tau", report.params.depth_tau},
                 {"color_tau", report.params.color_tau},
                 {"clean_radius", report.params.clean_radius},
                 {"min_area", report.params.min_area}};
  j["depth_regions"] = Json::array();
  for (const auto &r : report.depth_regions) j["depth_regions"].push_back(RegionJson(r));
  j["color_regions"] = Json::array();
  for (const auto &r : report.color_regions) j["color_regions"].push_back(RegionJson(r));
  j["stats"] = {{"depth", StatsJson(report.depth_stats)}, {"color", StatsJson(report.color_stats)}};
  return j;
}

ReportedFrame ReadReport(const std::string &path) {
  const Json j = ReadJsonFile(path);
  ReportedFrame f;
  for (const char *key : {"scene_id", "frame_id", "width", "height", "depth_regions",
                          "color_regions"}) {
    if (!j.contains(key)) throw ValidationError(path + ": missing key '" + key + "'");
  }
  f.scene_id = j["scene_id"].get<std::string>();
  f.frame_id = j["frame_id"].get<std::string>();
  f.width = j["width"].get<int>();
  f.height = j["height"].get<int>();
  f.depth_mask = MaskFromRegions(j["depth_regions"], f.width, f.height, path);
  f.color_mask = MaskFromRegions(j["color_regions"], f.width, f.height, path);
  return f;
}

void WriteInspection(const Inspection &inspection, double depth_scale, const std::string &out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  const int w = inspection.twin.intrinsics.width, h = inspection.twin.intrinsics.height;
  WriteJsonFile(InspectionReportJson(inspection.report, w, h), (dir / "report.json").string());
  WritePngGray8(ToPng8(inspection.depth_mask), (dir / "depth_mask.png").string());
  WritePngGray8(ToPng8(inspection.color_mask), (dir / "color_mask.png").string());
  WriteDisparityPng(inspection.depth_map, depth_scale, (dir / "depth_disparity.png").string(),
                    (dir / "depth_valid.png").string());
  WriteDisparityPng(inspection.color_map, 0.01, (dir / "color_disparity.png").string(),
                    (dir / "color_valid.png").string());
}

std::vector<BatchFrameOutcome> InspectDataset(const TriangleMesh &mesh, const std::string &root,
                                              const std::string &out_dir,
                                              const BatchOptions &options) {
  options.params.Validate();
  if (options.icp) options.icp->Validate();
  const SceneDataset ds = ReadDataset(root);
  std::vector<BatchFrameOutcome> jobs;
  for (const auto &scene : ds.scenes) {
    for (const auto &im : scene.defects.images) {
      BatchFrameOutcome o;
      o.scene_id = scene.id;
      o.frame_id = im.id;
      char name[16];
      std::snprintf(name, sizeof name, "%06d", im.id);
      o.report_dir = (fs::path(out_dir) / scene.id / name).string();
      jobs.push_back(o);
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      BatchFrameOutcome &o = jobs[i];
      try {
        const Scene &scene = *ds.FindScene(o.scene_id);
        auto pose_it = scene.poses.find(o.frame_id);
        if (pose_it == scene.poses.end() || pose_it->second.empty()) {
          throw ValidationError("no pose record");
        }
        const CameraRecord &cam = scene.cameras.at(o.frame_id);
        RgbdFrame frame;
        frame.intrinsics = cam.intrinsics;
        frame.color = ReadPngRgb(RgbPath(root, o.scene_id, o.frame_id));
        frame.depth = ReadDepthPng(DepthPath(root, o.scene_id, o.frame_id), cam.depth_scale);
        Inspection insp = InspectWithRefinement(mesh, frame, pose_it->second.front().pose,
                                                options.params, options.icp);
        insp.report.scene_id = o.scene_id;
        insp.report.frame_id = std::to_string(o.frame_id);
        WriteInspection(insp, cam.depth_scale, o.report_dir);
        o.depth_regions = insp.report.depth_regions.size();
        o.color_regions = insp.report.color_regions.size();
      } catch (const std::exception &e) {
        o.error = "scene " + o.scene_id + " frame " + std::to_string(o.frame_id) + ": " + e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size()))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  return jobs;
}

}  // namespace dtinspect
