#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtinspect/annotations.hpp"
#include "dtinspect/defect.hpp"
#include "dtinspect/json_io.hpp"

namespace dtinspect {

// ---- reports ---------------------------------------------------------------

Json InspectionReportJson(const InspectionReport &report, int width, int height);

struct ReportedFrame {
  std::string scene_id;
  std::string frame_id;
  int width = 0;
  int height = 0;
  BinaryMask depth_mask;
  BinaryMask color_mask;
};

/// Reads back the predicted masks of a report written by WriteInspection.
ReportedFrame ReadReport(const std::string &path);

/// report.json, depth_mask.png, color_mask.png (0/255) and the disparity
/// maps (16-bit, depth in depth_scale units, color in 0.01 delta E).
void WriteInspection(const Inspection &inspection, double depth_scale, const std::string &out_dir);

struct BatchOptions {
  InspectParams params;
  std::optional<IcpParams> icp;
  unsigned threads = 1;  // 0 picks the hardware concurrency
};

struct BatchFrameOutcome {
  std::string scene_id;
  int frame_id = 0;
  std::string report_dir;
  std::string error;  // empty on success
  std::size_t depth_regions = 0;
  std::size_t color_regions = 0;
};

/// Inspects every frame of every scene against its recorded pose. Frames are
/// independent; a failing frame is recorded and does not stop the others.
/// Reports go to out_dir/<scene>/<frame:06d>/.
std::vector<BatchFrameOutcome> InspectDataset(const TriangleMesh &mesh, const std::string &root,
                                              const std::string &out_dir,
                                              const BatchOptions &options);

// ---- evaluation ------------------------------------------------------------

struct CategoryScore {
  std::string category;
  Supercategory supercategory = Supercategory::kLogical;
  std::size_t images = 0;
  double mean_iou = 0.0;        // union of depth and color predictions
  double mean_iou_depth = 0.0;  // depth channel only
  double mean_iou_color = 0.0;  // color channel only
};

struct ImageScore {
  std::string scene_id;
  int frame_id = 0;
  std::string category;
  double iou = 0.0;
  double iou_depth = 0.0;
  double iou_color = 0.0;
};

struct Evaluation {
  std::vector<CategoryScore> categories;
  std::vector<ImageScore> images;
  /// Annotated frames without a report (not scored).
  std::vector<std::pair<std::string, int>> unreported;
};

/// Per category and image: IoU between the union of predicted regions and
/// the union of that category's ground-truth masks, then the mean per
/// category. Throws when a report has no ground-truth frame.
Evaluation EvaluateReports(const std::string &report_dir, const SceneDataset &dataset);

void WriteEvaluation(const Evaluation &eval, const std::string &out_dir);

// ---- synthetic datasets ----------------------------------------------------

enum class SynthDefect { kExistence, kDeformation, kColor };

const char *ToString(SynthDefect d);
SynthDefect SynthDefectFromString(const std::string &s);

struct SynthParams {
  SynthDefect defect = SynthDefect::kExistence;
  /// Deformation: bump height in mm. Color: blend toward the complementary
  /// color, c' = c + m (1 - 2c), m in [0, 1]. Ignored for existence.
  double magnitude = 3.0;
  std::uint64_t seed = 0;
  int frames = 20;
  double noise_sigma_mm = 0.0;
  /// Candidate sub-meshes, one picked per frame. Empty selects every group
  /// except the one with the most triangles.
  std::vector<std::string> components;
  CameraIntrinsics intrinsics;
  RigidTransform base_pose;
  double view_jitter_deg = 10.0;
  double view_jitter_mm = 15.0;
  double depth_scale = 0.1;
  std::string scene_id = "000000";

  void Validate() const;
};

/// Pixels whose noise-free render differs between the two meshes in depth
/// validity, depth (> 1e-4 mm) or color.
BinaryMask RenderDifference(const TriangleMesh &reference, const TriangleMesh &defected,
                            const RigidTransform &pose, const CameraIntrinsics &k);

/// Copy of the mesh with the defect applied to `component`.
TriangleMesh ApplyDefect(const TriangleMesh &mesh, SynthDefect defect, const std::string &component,
                         double magnitude);

/// Renders the defected frames, writes images and JSON records under
/// root/<scene_id>/ and returns the dataset.
SceneDataset Synthesize(const TriangleMesh &mesh, const SynthParams &params, const std::string &root);

}  // namespace dtinspect
