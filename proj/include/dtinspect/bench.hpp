#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/json_io.hpp"
#include "dtinspect/mesh.hpp"
#include "dtinspect/metrics.hpp"
#include "dtinspect/registration.hpp"

namespace dtinspect {

struct PerturbationSpec {
  int count = 1000;
  double max_rotation_deg = 10.0;
  double max_translation_mm = 10.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

/// Uniform random axis and direction, uniform angle in [0, max_rotation_deg]
/// and magnitude in [0, max_translation_mm]. R = R_gt R_delta, t = t_gt + dt.
/// Deterministic per (seed, index).
RigidTransform PerturbPose(const RigidTransform &gt, const PerturbationSpec &spec,
                           std::uint64_t index);

std::vector<double> DefaultThresholds();

struct StudyRow {
  int pose_id = 0;
  PoseError before;
  PoseError after;
  int iterations = 0;
  bool converged = false;
  friend bool operator==(const StudyRow &a, const StudyRow &b);
};

struct StudyOptions {
  double noise_sigma_mm = 0.0;
  std::uint64_t noise_seed = 0;
  unsigned threads = 1;  // 0 picks the hardware concurrency
};

struct StudyResult {
  std::vector<StudyRow> rows;
  ThresholdCurve curve_before;  // empty when there are no rows
  ThresholdCurve curve_after;
  double median_add_before = 0.0;
  double median_add_after = 0.0;
  double seconds = 0.0;
};

/// Renders the ground-truth depth once (plus optional Gaussian noise), then
/// refines every perturbed pose with ICP and records errors before/after.
/// ADD is measured over the mesh vertices.
StudyResult RunIcpStudy(const TriangleMesh &mesh, const RigidTransform &gt_pose,
                        const CameraIntrinsics &k, const PerturbationSpec &spec,
                        const IcpParams &icp, const std::vector<double> &thresholds,
                        const StudyOptions &options = {});

void WriteStudyCsv(const StudyResult &result, const std::string &path);
Json StudySummaryJson(const StudyResult &result, const PerturbationSpec &spec);

struct BenchStats {
  std::string phase;  // init | render | write
  std::vector<double> seconds;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

BenchStats MakeStats(const std::string &phase, std::vector<double> seconds);

struct RenderBenchReport {
  BenchStats init;
  BenchStats render;
  BenchStats write;  // empty when no output directory was given
  long peak_rss_kb = 0;
};

/// `load` is timed as the init phase. Render and write are timed per run on
/// a monotonic clock; `warmup` extra runs are executed first and discarded.
/// An empty out_dir skips the write phase.
RenderBenchReport RunRenderBench(const std::function<TriangleMesh()> &load,
                                 const RigidTransform &pose, const CameraIntrinsics &k, int runs,
                                 const std::string &out_dir, int warmup = 0);

Json BenchReportJson(const RenderBenchReport &report);

}  // namespace dtinspect
