#include <algorithm>
#include <cmath>

#include "dtinspect/defect.hpp"

namespace dtinspect {

namespace {

double Percentile(std::vector<float> &sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

void InspectParams::Validate() const {
  if (!(depth_tau > 0.0)) throw ValidationError("inspect: depth_tau must be positive");
  if (!(color_tau > 0.0)) throw ValidationError("inspect: color_tau must be positive");
  if (clean_radius < 0) throw ValidationError("inspect: clean_radius must be >= 0");
  if (min_area < 1) throw ValidationError("inspect: min_area must be >= 1");
}

ChannelStats SummarizeChannel(const DisparityMap &map, const BinaryMask &flagged) {
  ChannelStats stats;
  std::vector<float> values;
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (map.valid.data[i]) values.push_back(map.values.data[i]);
  }
  stats.valid_pixels = values.size();
  stats.flagged_pixels = CountSet(flagged);
  std::sort(values.begin(), values.end());
  stats.p50 = Percentile(values, 0.50);
  stats.p90 = Percentile(values, 0.90);
  stats.p99 = Percentile(values, 0.99);
  stats.max = values.empty() ? 0.0 : values.back();
  return stats;
}

Inspection Inspect(const TriangleMesh &mesh, const RgbdFrame &frame, const RigidTransform &pose,
                   const InspectParams &params) {
  params.Validate();
  frame.Validate();
  RequireValid(pose, "inspection pose");

  Inspection out;
  out.twin = RenderRgbd(mesh, pose, frame.intrinsics);
  out.depth_map = DepthDisparity(out.twin.depth, frame.depth);
  out.color_map = ColorDisparity(out.twin.color, frame.color, DepthValidity(out.twin.depth));
  out.depth_mask = MorphologicalClean(Threshold(out.depth_map, params.depth_tau), params.clean_radius);
  out.color_mask = MorphologicalClean(Threshold(out.color_map, params.color_tau), params.clean_radius);

  InspectionReport &report = out.report;
  report.pose_used = pose;
  report.params = params;
  report.depth_regions = ConnectedComponents(out.depth_mask, params.min_area, out.depth_map);
  report.color_regions = ConnectedComponents(out.color_mask, params.min_area, out.color_map);
  // Flagged counts reflect what survives the area filter.
  out.depth_mask = RegionsMask(report.depth_regions, frame.intrinsics.width, frame.intrinsics.height);
  out.color_mask = RegionsMask(report.color_regions, frame.intrinsics.width, frame.intrinsics.height);
  report.depth_stats = SummarizeChannel(out.depth_map, out.depth_mask);
  report.color_stats = SummarizeChannel(out.color_map, out.color_mask);
  return out;
}

Inspection InspectWithRefinement(const TriangleMesh &mesh, const RgbdFrame &frame,
                                 const RigidTransform &initial_pose, const InspectParams &params,
                                 const std::optional<IcpParams> &icp) {
  if (!icp) return Inspect(mesh, frame, initial_pose, params);
  IcpSummary summary;
  summary.result = IcpRefine(mesh, frame.depth, frame.intrinsics, initial_pose, *icp);
  summary.applied = summary.result.diagnostic.empty() && std::isfinite(summary.result.rmse);
  Inspection out =
      Inspect(mesh, frame, summary.applied ? summary.result.refined_pose : initial_pose, params);
  out.report.icp = std::move(summary);
  return out;
}

}  // namespace dtinspect
