#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <thread>

#include "dtinspect/bench.hpp"
#include "dtinspect/error.hpp"
#include "dtinspect/renderer.hpp"

namespace dtinspect {

namespace {

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Json CurveJson(const ThresholdCurve &c) {
  Json j;
  j["thresholds_mm"] = c.thresholds;
  j["success_rates"] = c.success_rates;
  return j;
}

Json ErrorJson(const PoseError &e) {
  return {{"rotation_deg", e.rotation_deg}, {"translation_mm", e.translation_mm},
          {"add_mm", e.add_mm}};
}

}  // namespace

bool operator==(const StudyRow &a, const StudyRow &b) {
  auto same = [](const PoseError &x, const PoseError &y) {
    return x.rotation_deg == y.rotation_deg && x.translation_mm == y.translation_mm &&
           x.add_mm == y.add_mm;
  };
  return a.pose_id == b.pose_id && same(a.before, b.before) && same(a.after, b.after) &&
         a.iterations == b.iterations && a.converged == b.converged;
}

StudyResult RunIcpStudy(const TriangleMesh &mesh, const RigidTransform &gt_pose,
                        const CameraIntrinsics &k, const PerturbationSpec &spec,
                        const IcpParams &icp, const std::vector<double> &thresholds,
                        const StudyOptions &options) {
  spec.Validate();
  icp.Validate();
  RequireValid(gt_pose, "ground-truth pose");
  if (!(options.noise_sigma_mm >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  const auto start = std::chrono::steady_clock::now();

  DepthImage depth = RenderDepthOnly(mesh, gt_pose, k);
  if (options.noise_sigma_mm > 0.0) {
    std::mt19937_64 rng(options.noise_seed);
    std::normal_distribution<double> noise(0.0, options.noise_sigma_mm);
    for (float &d : depth.data) {
      if (IsValidDepth(d)) d = static_cast<float>(d + noise(rng));
    }
  }
  const IcpTarget target = PrepareTarget(depth, k, icp);
  if (target.cloud.size() < 3) throw ValidationError("icp study: object not visible at gt pose");
  const PointCloud source = SampleMeshSurface(mesh, icp.sample_count, icp.seed);
  const std::vector<Eigen::Vector3d> &model_points = mesh.vertices;

  StudyResult result;
  result.rows.resize(spec.count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < spec.count; i = next++) {
      const RigidTransform initial = PerturbPose(gt_pose, spec, i);
      const IcpResult r = RegisterToTarget(source, target, initial, icp);
      StudyRow &row = result.rows[i];
      row.pose_id = i;
      row.before = ComputePoseError(model_points, initial, gt_pose);
      row.after = ComputePoseError(model_points, r.refined_pose, gt_pose);
      row.iterations = r.iterations;
      row.converged = r.converged;
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, std::max(1, spec.count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }

  std::vector<double> before, after;
  for (const auto &row : result.rows) {
    before.push_back(row.before.add_mm);
    after.push_back(row.after.add_mm);
  }
  if (!result.rows.empty()) {
    result.curve_before = SuccessCurve(before, thresholds);
    result.curve_after = SuccessCurve(after, thresholds);
  } else {
    result.curve_before.thresholds = result.curve_after.thresholds = thresholds;
  }
  result.median_add_before = Median(before);
  result.median_add_after = Median(after);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void WriteStudyCsv(const StudyResult &result, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "pose_id,rot_before_deg,trans_before_mm,add_before_mm,rot_after_deg,trans_after_mm,"
         "add_after_mm,iterations,converged\n";
  for (const auto &r : result.rows) {
    out << r.pose_id << ',' << r.before.rotation_deg << ',' << r.before.translation_mm << ','
        << r.before.add_mm << ',' << r.after.rotation_deg << ',' << r.after.translation_mm << ','
        << r.after.add_mm << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Json StudySummaryJson(const StudyResult &result, const PerturbationSpec &spec) {
  Json j;
  j["count"] = result.rows.size();
  j["max_rotation_deg"] = spec.max_rotation_deg;
  j["max_translation_mm"] = spec.max_translation_mm;
  j["seed"] = spec.seed;
  j["median_add_before_mm"] = result.median_add_before;
  j["median_add_after_mm"] = result.median_add_after;
  std::size_t converged = 0;
  for (const auto &r : result.rows) converged += r.converged;
  j["converged"] = converged;
  j["before"] = CurveJson(result.curve_before);
  j["after"] = CurveJson(result.curve_after);
  if (!result.rows.empty()) {
    auto worst = std::max_element(result.rows.begin(), result.rows.end(),
                                  [](auto &a, auto &b) { return a.after.add_mm < b.after.add_mm; });
    j["worst_after"] = ErrorJson(worst->after);
  }
  j["seconds"] = result.seconds;
  return j;
}

}  // namespace dtinspect
