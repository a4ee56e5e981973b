#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/image.hpp"
#include "dtinspect/kdtree.hpp"
#include "dtinspect/mesh.hpp"

namespace dtinspect {

/// Area-uniform samples on the mesh surface with face normals (and
/// interpolated colors when the mesh has them). Deterministic per seed.
PointCloud SampleMeshSurface(const TriangleMesh &mesh, std::size_t n, std::uint64_t seed);

/// PCA normals from each point and its k nearest neighbors, oriented toward
/// the camera origin. Requires at least k + 1 points.
PointCloud EstimateNormals(const PointCloud &cloud, std::size_t k);
/// Same, reusing an index already built over cloud.points.
PointCloud EstimateNormals(const PointCloud &cloud, const KdTree &index, std::size_t k);

enum class IcpMethod { kPointToPoint, kPointToPlane };

const char *ToString(IcpMethod m);
IcpMethod IcpMethodFromString(const std::string &s);

struct IcpParams {
  int max_iterations = 50;
  double max_correspondence_distance = 10.0;  // mm
  double convergence_rmse_delta = 1e-6;       // relative
  IcpMethod method = IcpMethod::kPointToPlane;
  int sample_count = 5000;
  int normal_k = 20;
  std::uint64_t seed = 0;
  /// Skip model samples whose normal faces away from the camera at the
  /// current pose; those can never be observed in the depth image.
  bool visible_only = true;
  /// With visible_only, also skip samples seen at grazing incidence: the
  /// cosine between the normal and the line of sight must reach this value.
  /// Sparse, tangential pixels there bias point-to-plane alignment.
  double min_view_cosine = 0.2;

  void Validate() const;
};

struct IcpResult {
  RigidTransform refined_pose;
  double rmse = 0.0;  // mm, over the correspondences at the final pose
  int iterations = 0;
  bool converged = false;
  std::size_t correspondence_count = 0;
  IcpMethod method_used = IcpMethod::kPointToPlane;
  std::vector<double> rmse_history;
  std::string diagnostic;  // empty unless the loop stopped on a degeneracy
};

/// Fixed (scene) side of the registration: points, optional normals and index.
struct IcpTarget {
  PointCloud cloud;
  std::shared_ptr<const KdTree> index;
};

/// Back-projects valid depth and estimates normals when enough points exist.
IcpTarget PrepareTarget(const DepthImage &depth, const CameraIntrinsics &k, const IcpParams &params);
/// Wraps an arbitrary cloud (normals optional).
IcpTarget PrepareTarget(PointCloud cloud);

/// Registers model-frame `source` (points + normals) onto the target,
/// starting at `initial` (model to camera).
IcpResult RegisterToTarget(const PointCloud &source, const IcpTarget &target,
                           const RigidTransform &initial, const IcpParams &params);

/// Full refinement: samples the mesh, back-projects the scene depth and runs
/// ICP. Degenerate input yields a non-converged result with a diagnostic.
IcpResult IcpRefine(const TriangleMesh &mesh, const DepthImage &scene_depth,
                    const CameraIntrinsics &k, const RigidTransform &initial_pose,
                    const IcpParams &params);

/// Closed-form least-squares rigid motion mapping src[i] onto dst[i] (SVD of
/// the cross-covariance). std::nullopt when fewer than 3 points or collinear.
std::optional<RigidTransform> KabschAlign(const std::vector<Eigen::Vector3d> &src,
                                          const std::vector<Eigen::Vector3d> &dst);

/// One linearized point-to-plane step: minimizes sum(((R p + t) - q) . n)^2
/// to first order in the rotation. std::nullopt when the system is singular.
std::optional<RigidTransform> PointToPlaneStep(const std::vector<Eigen::Vector3d> &src,
                                               const std::vector<Eigen::Vector3d> &dst,
                                               const std::vector<Eigen::Vector3d> &dst_normals);

}  // namespace dtinspect
