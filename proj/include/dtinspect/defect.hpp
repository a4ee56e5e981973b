#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtinspect/camera.hpp"
#include "dtinspect/disparity.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/mesh.hpp"
#include "dtinspect/registration.hpp"
#include "dtinspect/renderer.hpp"
#include "dtinspect/rle.hpp"

namespace dtinspect {

struct BoundingBox {
  int x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

struct DefectRegion {
  Rle pixels;
  BoundingBox bbox;
  std::size_t area = 0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  DisparityChannel channel = DisparityChannel::kDepth;
  double score = 0.0;  // mean disparity over the region (mm or delta E)
};

/// Set where the map is valid and value >= tau. tau must be positive.
BinaryMask Threshold(const DisparityMap &map, double tau);

/// Opening then closing with a (2 radius + 1)^2 square; pixels outside the
/// image are ignored. Radius 0 returns the input.
BinaryMask MorphologicalClean(const BinaryMask &mask, int radius);
BinaryMask Erode(const BinaryMask &mask, int radius);
BinaryMask Dilate(const BinaryMask &mask, int radius);

/// 8-connected components with at least min_area pixels, largest first.
/// Scores are the mean of `source` over each region.
std::vector<DefectRegion> ConnectedComponents(const BinaryMask &mask, std::size_t min_area,
                                              const DisparityMap &source);

/// |a & b| / |a | b|; 0 when both masks are empty.
double Iou(const BinaryMask &a, const BinaryMask &b);

std::size_t CountSet(const BinaryMask &mask);
BinaryMask Union(const BinaryMask &a, const BinaryMask &b);
/// Union of all region pixel sets; width/height must be given for empty lists.
BinaryMask RegionsMask(const std::vector<DefectRegion> &regions, int width, int height);

struct InspectParams {
  double depth_tau = 2.0;   // mm
  double color_tau = 20.0;  // delta E
  int clean_radius = 1;     // px
  std::size_t min_area = 25;

  void Validate() const;
};

struct ChannelStats {
  std::size_t valid_pixels = 0;
  std::size_t flagged_pixels = 0;
  double p50 = 0.0, p90 = 0.0, p99 = 0.0, max = 0.0;
};

ChannelStats SummarizeChannel(const DisparityMap &map, const BinaryMask &flagged);

struct IcpSummary {
  bool applied = false;
  IcpResult result;
};

struct InspectionReport {
  std::string scene_id;
  std::string frame_id;
  RigidTransform pose_used;
  std::optional<IcpSummary> icp;
  InspectParams params;
  std::vector<DefectRegion> depth_regions;
  std::vector<DefectRegion> color_regions;
  ChannelStats depth_stats;
  ChannelStats color_stats;
};

/// Report plus the intermediate images a caller may want to export.
struct Inspection {
  InspectionReport report;
  RgbdFrame twin;
  DisparityMap depth_map;
  DisparityMap color_map;
  BinaryMask depth_mask;
  BinaryMask color_mask;
};

/// Renders the twin at `pose`, computes depth and color disparity against the
/// captured frame, thresholds, cleans and extracts regions.
Inspection Inspect(const TriangleMesh &mesh, const RgbdFrame &frame, const RigidTransform &pose,
                   const InspectParams &params);

/// Optional ICP refinement against the captured depth, then Inspect. The
/// refined pose is used unless ICP stopped on a degeneracy.
Inspection InspectWithRefinement(const TriangleMesh &mesh, const RgbdFrame &frame,
                                 const RigidTransform &initial_pose, const InspectParams &params,
                                 const std::optional<IcpParams> &icp);

}  // namespace dtinspect
