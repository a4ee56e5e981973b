#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "dtinspect/annotations.hpp"
#include "dtinspect/bench.hpp"
#include "dtinspect/defect.hpp"
#include "dtinspect/error.hpp"
#include "dtinspect/json_io.hpp"
#include "dtinspect/pipeline.hpp"
#include "dtinspect/png_io.hpp"
#include "dtinspect/registration.hpp"
#include "dtinspect/renderer.hpp"
#include "dtinspect/simd/kernels.hpp"
#include "dtinspect/test_meshes.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace dtinspect;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

TriangleMesh LoadMeshArg(const std::string &spec) {
  if (spec == "builtin:superellipsoid") return MakeSuperellipsoid();
  if (spec == "builtin:motor") return MakeAxialMotor();
  TriangleMesh mesh = LoadMesh(spec);
  mesh.Validate();
  return mesh;
}

RigidTransform ReadPose(const std::string &path) {
  return PoseFromJson(ReadJsonFile(path), path);
}

CameraRecord ReadCamera(const std::string &path) {
  if (path.empty()) return {DefaultIntrinsics(), 0.1};
  return CameraFromJson(ReadJsonFile(path), path);
}

void MakeDir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::string Join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

struct IcpFlags {
  IcpParams params;
  std::string method = "point-to-plane";

  void Add(CLI::App *app) {
    app->add_option("--icp-iterations", params.max_iterations, "ICP iteration cap")
        ->capture_default_str();
    app->add_option("--icp-max-distance", params.max_correspondence_distance,
                    "Correspondence gate in mm")
        ->capture_default_str();
    app->add_option("--icp-rmse-delta", params.convergence_rmse_delta,
                    "Relative RMSE change that stops ICP")
        ->capture_default_str();
    app->add_option("--icp-method", method, "point-to-plane | point-to-point")
        ->capture_default_str();
    app->add_option("--icp-samples", params.sample_count, "Model surface samples")
        ->capture_default_str();
    app->add_option("--icp-normal-k", params.normal_k, "Neighbors for scene normals")
        ->capture_default_str();
    app->add_option("--icp-seed", params.seed, "Sampling seed")->capture_default_str();
    app->add_flag("--icp-all-samples{false},--icp-visible-only{true}", params.visible_only,
                  "Use every model sample, or only those facing the camera (default)");
    app->add_option("--icp-min-view-cosine", params.min_view_cosine,
                    "Skip samples seen more obliquely than this cosine")
        ->capture_default_str();
  }

  IcpParams Get() {
    params.method = IcpMethodFromString(method);
    params.Validate();
    return params;
  }
};

struct InspectFlags {
  InspectParams params;

  void Add(CLI::App *app) {
    app->add_option("--depth-tau", params.depth_tau, "Depth threshold in mm")->capture_default_str();
    app->add_option("--color-tau", params.color_tau, "Color threshold in delta E")
        ->capture_default_str();
    app->add_option("--clean-radius", params.clean_radius, "Morphology radius in px")
        ->capture_default_str();
    app->add_option("--min-area", params.min_area, "Smallest region in px")->capture_default_str();
  }
};

void PrintRegions(const InspectionReport &r) {
  std::printf("depth regions: %zu, color regions: %zu\n", r.depth_regions.size(),
              r.color_regions.size());
  for (const auto *list : {&r.depth_regions, &r.color_regions}) {
    for (const auto &reg : *list) {
      std::printf("  %-5s area %6zu  bbox (%d,%d,%d,%d)  score %.3f\n", ToString(reg.channel),
                  reg.area, reg.bbox.x, reg.bbox.y, reg.bbox.w, reg.bbox.h, reg.score);
    }
  }
}

void PrintIcp(const IcpResult &r) {
  std::printf("icp: %s, %d iterations, rmse %.4f mm, %zu correspondences, %s%s%s\n",
              ToString(r.method_used), r.iterations, r.rmse, r.correspondence_count,
              r.converged ? "converged" : "not converged", r.diagnostic.empty() ? "" : ": ",
              r.diagnostic.c_str());
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Digital-twin RGB-D defect inspection"};
  app.config_formatter(std::make_shared<cli::JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  // render
  std::string mesh_path, pose_path, camera_path, out_dir;
  auto *render = app.add_subcommand("render", "Render RGB and depth PNGs of a posed mesh");
  render->add_option("--mesh", mesh_path, "OBJ/PLY file or builtin:superellipsoid|builtin:motor")
      ->required();
  render->add_option("--pose", pose_path, "Pose JSON (cam_R_m2c, cam_t_m2c)")->required();
  render->add_option("--intrinsics", camera_path, "Camera JSON (cam_K, width, height, depth_scale)");
  render->add_option("--out", out_dir, "Output directory")->required();

  // inspect
  std::string rgb_path, depth_path, dataset_root;
  bool refine = false;
  unsigned threads = 1;
  InspectFlags inspect_flags;
  IcpFlags inspect_icp;
  auto *inspect = app.add_subcommand("inspect", "Compare a captured RGB-D frame with its twin");
  inspect->add_option("--mesh", mesh_path, "CAD mesh")->required();
  inspect->add_option("--rgb", rgb_path, "Captured color PNG");
  inspect->add_option("--depth", depth_path, "Captured 16-bit depth PNG");
  inspect->add_option("--intrinsics", camera_path, "Camera JSON");
  inspect->add_option("--pose", pose_path, "Initial pose JSON");
  inspect->add_option("--dataset", dataset_root, "Inspect every frame of a dataset instead");
  inspect->add_option("--threads", threads, "Concurrent frames in dataset mode (0 = all cores)")
      ->capture_default_str();
  inspect->add_flag("--refine,!--no-refine", refine, "Refine the pose with ICP first");
  inspect->add_option("--out", out_dir, "Output directory")->required();
  inspect_flags.Add(inspect);
  inspect_icp.Add(inspect);

  // evaluate
  std::string reports_dir;
  auto *evaluate = app.add_subcommand("evaluate", "Mean IoU per defect category");
  evaluate->add_option("--reports", reports_dir, "Directory of inspection reports")->required();
  evaluate->add_option("--dataset", dataset_root, "Ground-truth dataset root")->required();
  evaluate->add_option("--out", out_dir, "Output directory")->required();

  // refine
  IcpFlags refine_icp;
  auto *refine_cmd = app.add_subcommand("refine", "Refine a pose against a depth image with ICP");
  refine_cmd->add_option("--mesh", mesh_path, "CAD mesh")->required();
  refine_cmd->add_option("--depth", depth_path, "16-bit depth PNG")->required();
  refine_cmd->add_option("--intrinsics", camera_path, "Camera JSON");
  refine_cmd->add_option("--pose", pose_path, "Initial pose JSON")->required();
  refine_cmd->add_option("--out", out_dir, "Output directory")->required();
  refine_icp.Add(refine_cmd);

  // bench-render
  std::string bench_mesh = "builtin:superellipsoid", synth_mesh = "builtin:motor";
  int runs = 100, warmup = 0;
  bool no_write = false;
  auto *bench_render = app.add_subcommand("bench-render", "Time init, render and write phases");
  bench_render->add_option("--mesh", bench_mesh, "CAD mesh")->capture_default_str();
  bench_render->add_option("--pose", pose_path, "Pose JSON (default: built-in view)");
  bench_render->add_option("--intrinsics", camera_path, "Camera JSON");
  bench_render->add_option("--runs", runs, "Timed runs")->capture_default_str();
  bench_render->add_option("--warmup", warmup, "Discarded runs before timing")->capture_default_str();
  bench_render->add_flag("--no-write", no_write, "Skip the write phase");
  bench_render->add_option("--out", out_dir, "Output directory")->required();

  // bench-icp
  PerturbationSpec spec;
  StudyOptions study;
  std::vector<double> thresholds = DefaultThresholds();
  IcpFlags study_icp;
  auto *bench_icp = app.add_subcommand("bench-icp", "Perturb-then-refine ICP study");
  bench_icp->add_option("--mesh", bench_mesh, "CAD mesh")->capture_default_str();
  bench_icp->add_option("--pose", pose_path, "Ground-truth pose JSON (default: built-in view)");
  bench_icp->add_option("--intrinsics", camera_path, "Camera JSON");
  bench_icp->add_option("--count", spec.count, "Perturbed poses")->capture_default_str();
  bench_icp->add_option("--max-rotation", spec.max_rotation_deg, "Degrees")->capture_default_str();
  bench_icp->add_option("--max-translation", spec.max_translation_mm, "mm")->capture_default_str();
  bench_icp->add_option("--seed", spec.seed, "Perturbation seed")->capture_default_str();
  bench_icp->add_option("--noise", study.noise_sigma_mm, "Depth noise sigma in mm")
      ->capture_default_str();
  bench_icp->add_option("--noise-seed", study.noise_seed, "Noise seed")->capture_default_str();
  bench_icp->add_option("--threads", study.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  bench_icp->add_option("--thresholds", thresholds, "ADD thresholds in mm, ascending");
  bench_icp->add_option("--out", out_dir, "Output directory")->required();
  study_icp.Add(bench_icp);

  // dataset-validate
  auto *validate = app.add_subcommand("dataset-validate", "Check a dataset and print its tallies");
  validate->add_option("--root", dataset_root, "Dataset root")->required();
  validate->add_option("--out", out_dir, "Optional directory for summary.json");

  // synth
  SynthParams synth_params;
  std::string defect_name = "existence";
  auto *synth = app.add_subcommand("synth", "Generate a synthetic defect dataset");
  synth->add_option("--mesh", synth_mesh, "Mesh with named sub-meshes")->capture_default_str();
  synth->add_option("--defect", defect_name, "existence | deformation | color")->capture_default_str();
  synth->add_option("--magnitude", synth_params.magnitude,
                    "Deformation height in mm, or color blend in [0, 1]")
      ->capture_default_str();
  synth->add_option("--seed", synth_params.seed, "Seed")->capture_default_str();
  synth->add_option("--frames", synth_params.frames, "Frames")->capture_default_str();
  synth->add_option("--noise", synth_params.noise_sigma_mm, "Depth noise sigma in mm")
      ->capture_default_str();
  synth->add_option("--component", synth_params.components,
                    "Candidate sub-mesh (repeatable; default: all but the largest)");
  synth->add_option("--intrinsics", camera_path, "Camera JSON");
  synth->add_option("--pose", pose_path, "Base view pose JSON (default: built-in view)");
  synth->add_option("--scene", synth_params.scene_id, "Scene directory name")->capture_default_str();
  synth->add_option("--out", out_dir, "Dataset root")->required();

  // make-mesh
  std::string kind;
  auto *make_mesh = app.add_subcommand("make-mesh", "Write a built-in test mesh");
  make_mesh->add_option("--kind", kind, "superellipsoid | motor")
      ->required()
      ->check(CLI::IsMember({"superellipsoid", "motor"}));
  make_mesh->add_option("--out", out_dir, "Output .obj or .ply path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (render->parsed()) {
      const TriangleMesh mesh = LoadMeshArg(mesh_path);
      const RigidTransform pose = ReadPose(pose_path);
      const CameraRecord cam = ReadCamera(camera_path);
      MakeDir(out_dir);
      const RgbdFrame frame = RenderRgbd(mesh, pose, cam.intrinsics);
      WriteFrame(frame, cam.depth_scale, Join(out_dir, "rgb.png"), Join(out_dir, "depth.png"));
      std::size_t valid = 0;
      for (float d : frame.depth.data) valid += IsValidDepth(d);
      if (valid == 0) std::fprintf(stderr, "warning: object not visible, depth image is empty\n");
      std::printf("wrote %s and %s (%zu valid depth pixels)\ndepth_scale %g\n",
                  Join(out_dir, "rgb.png").c_str(), Join(out_dir, "depth.png").c_str(), valid,
                  cam.depth_scale);
    } else if (inspect->parsed()) {
      const TriangleMesh mesh = LoadMeshArg(mesh_path);
      std::optional<IcpParams> icp;
      if (refine) icp = inspect_icp.Get();
      if (!dataset_root.empty()) {
        BatchOptions options{inspect_flags.params, icp, threads};
        const auto outcomes = InspectDataset(mesh, dataset_root, out_dir, options);
        std::size_t failed = 0;
        for (const auto &o : outcomes) {
          if (!o.error.empty()) {
            ++failed;
            std::fprintf(stderr, "error: %s\n", o.error.c_str());
            continue;
          }
          std::printf("%s/%06d: %zu depth, %zu color regions\n", o.scene_id.c_str(), o.frame_id,
                      o.depth_regions, o.color_regions);
        }
        std::printf("inspected %zu frames, %zu failed\n", outcomes.size() - failed, failed);
        return failed ? kExitValidation : 0;
      }
      if (rgb_path.empty() || depth_path.empty() || pose_path.empty()) {
        throw ValidationError("inspect: --rgb, --depth and --pose are required without --dataset");
      }
      const CameraRecord cam = ReadCamera(camera_path);
      RgbdFrame frame;
      frame.intrinsics = cam.intrinsics;
      frame.color = ReadPngRgb(rgb_path);
      frame.depth = ReadDepthPng(depth_path, cam.depth_scale);
      Inspection insp =
          InspectWithRefinement(mesh, frame, ReadPose(pose_path), inspect_flags.params, icp);
      insp.report.frame_id = fs::path(rgb_path).stem().string();
      WriteInspection(insp, cam.depth_scale, out_dir);
      if (insp.report.icp) PrintIcp(insp.report.icp->result);
      PrintRegions(insp.report);
      std::printf("report: %s\n", Join(out_dir, "report.json").c_str());
    } else if (evaluate->parsed()) {
      const SceneDataset ds = ReadDataset(dataset_root);
      const Evaluation eval = EvaluateReports(reports_dir, ds);
      WriteEvaluation(eval, out_dir);
      std::printf("%-12s %-11s %6s %9s\n", "category", "super", "images", "mean IoU");
      for (const auto &c : eval.categories) {
        std::printf("%-12s %-11s %6zu %8.1f%%\n", c.category.c_str(), ToString(c.supercategory),
                    c.images, 100.0 * c.mean_iou);
      }
      if (!eval.unreported.empty()) {
        std::printf("%zu annotated frames have no report\n", eval.unreported.size());
      }
    } else if (refine_cmd->parsed()) {
      const TriangleMesh mesh = LoadMeshArg(mesh_path);
      const CameraRecord cam = ReadCamera(camera_path);
      const DepthImage depth = ReadDepthPng(depth_path, cam.depth_scale);
      const IcpResult r = IcpRefine(mesh, depth, cam.intrinsics, ReadPose(pose_path), refine_icp.Get());
      MakeDir(out_dir);
      WriteJsonFile(PoseToJson(r.refined_pose), Join(out_dir, "refined_pose.json"));
      Json j;
      j["method"] = ToString(r.method_used);
      j["converged"] = r.converged;
      j["iterations"] = r.iterations;
      j["rmse_mm"] = r.rmse;
      j["correspondences"] = r.correspondence_count;
      j["rmse_history"] = r.rmse_history;
      j["diagnostic"] = r.diagnostic;
      j["refined_pose"] = PoseToJson(r.refined_pose);
      WriteJsonFile(j, Join(out_dir, "icp.json"));
      PrintIcp(r);
    } else if (bench_render->parsed()) {
      const CameraRecord cam = ReadCamera(camera_path);
      const RigidTransform pose = pose_path.empty() ? DefaultObjectPose() : ReadPose(pose_path);
      const RenderBenchReport report = RunRenderBench(
          [&] { return LoadMeshArg(bench_mesh); }, pose, cam.intrinsics, runs,
          no_write ? std::string() : out_dir, warmup);
      MakeDir(out_dir);
      Json j = BenchReportJson(report);
      j["isa"] = std::string(simd::ActiveKernels().isa);
      WriteJsonFile(j, Join(out_dir, "bench_render.json"));
      for (const auto *s : {&report.init, &report.render, &report.write}) {
        if (s->seconds.empty()) continue;
        std::printf("%-6s mean %8.3f ms  std %7.3f ms  (%zu runs)\n", s->phase.c_str(),
                    1e3 * s->mean, 1e3 * s->stddev, s->seconds.size());
      }
      std::printf("peak RSS %ld KiB, kernels %s\n", report.peak_rss_kb, std::string(simd::ActiveKernels().isa).c_str());
    } else if (bench_icp->parsed()) {
      const TriangleMesh mesh = LoadMeshArg(bench_mesh);
      const CameraRecord cam = ReadCamera(camera_path);
      const RigidTransform gt = pose_path.empty() ? DefaultObjectPose() : ReadPose(pose_path);
      const StudyResult result =
          RunIcpStudy(mesh, gt, cam.intrinsics, spec, study_icp.Get(), thresholds, study);
      MakeDir(out_dir);
      WriteStudyCsv(result, Join(out_dir, "icp_study.csv"));
      WriteJsonFile(StudySummaryJson(result, spec), Join(out_dir, "icp_study.json"));
      std::printf("%zu poses in %.1f s; median ADD %.4f -> %.4f mm\n", result.rows.size(),
                  result.seconds, result.median_add_before, result.median_add_after);
      for (std::size_t i = 0; i < result.curve_after.thresholds.size() && !result.rows.empty(); ++i) {
        std::printf("  ADD < %6.2f mm: before %5.1f%%  after %5.1f%%\n",
                    result.curve_after.thresholds[i], 100.0 * result.curve_before.success_rates[i],
                    100.0 * result.curve_after.success_rates[i]);
      }
    } else if (validate->parsed()) {
      const SceneDataset ds = ReadDataset(dataset_root);
      const CountSummary s = ValidateCounts(ds);
      std::printf("%zu scenes, %zu images\n", ds.scenes.size(), s.images);
      std::printf("structural: %zu images, %zu annotations\n", s.structural_images,
                  s.structural_annotations);
      std::printf("logical:    %zu images, %zu annotations\n", s.logical_images,
                  s.logical_annotations);
      for (const auto &[name, n] : s.per_category) std::printf("  %-12s %zu\n", name.c_str(), n);
      for (const auto &[scene, image] : s.multi_logical_images) {
        std::printf("multiple logical annotations: scene %s image %d\n", scene.c_str(), image);
      }
      if (!out_dir.empty()) {
        MakeDir(out_dir);
        Json j;
        j["scenes"] = ds.scenes.size();
        j["images"] = s.images;
        j["structural_images"] = s.structural_images;
        j["structural_annotations"] = s.structural_annotations;
        j["logical_images"] = s.logical_images;
        j["logical_annotations"] = s.logical_annotations;
        j["per_category"] = s.per_category;
        j["multi_logical_images"] = Json::array();
        for (const auto &[scene, image] : s.multi_logical_images) {
          j["multi_logical_images"].push_back({{"scene_id", scene}, {"image_id", image}});
        }
        WriteJsonFile(j, Join(out_dir, "summary.json"));
      }
    } else if (synth->parsed()) {
      const TriangleMesh mesh = LoadMeshArg(synth_mesh);
      const CameraRecord cam = ReadCamera(camera_path);
      synth_params.defect = SynthDefectFromString(defect_name);
      synth_params.intrinsics = cam.intrinsics;
      synth_params.depth_scale = cam.depth_scale;
      synth_params.base_pose = pose_path.empty() ? DefaultMotorPose() : ReadPose(pose_path);
      const SceneDataset ds = Synthesize(mesh, synth_params, out_dir);
      std::printf("wrote %d frames with %zu %s annotations under %s\n", synth_params.frames,
                  ds.scenes.front().defects.annotations.size(), defect_name.c_str(),
                  Join(out_dir, synth_params.scene_id).c_str());
    } else if (make_mesh->parsed()) {
      const TriangleMesh mesh = kind == "motor" ? MakeAxialMotor() : MakeSuperellipsoid();
      SaveMesh(mesh, out_dir);
      std::printf("wrote %s (%zu vertices, %zu triangles)\n", out_dir.c_str(),
                  mesh.vertices.size(), mesh.triangles.size());
    }
  } catch (const ValidationError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const IoError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const NumericalError &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "internal failure: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
