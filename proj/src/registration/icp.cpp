#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "dtinspect/error.hpp"
#include "dtinspect/registration.hpp"

namespace dtinspect {

namespace {

struct Correspondences {
  std::vector<Eigen::Vector3d> src;  // transformed model samples
  std::vector<Eigen::Vector3d> dst;
  std::vector<Eigen::Vector3d> dst_normals;
  double sum_sq = 0.0;

  std::size_t size() const { return src.size(); }
  double Rmse() const { return src.empty() ? 0.0 : std::sqrt(sum_sq / src.size()); }
};

void FindCorrespondences(const PointCloud &source, const IcpTarget &target,
                         const RigidTransform &pose, const IcpParams &params, bool with_normals,
                         Correspondences &out) {
  out.src.clear();
  out.dst.clear();
  out.dst_normals.clear();
  out.sum_sq = 0.0;
  const bool cull = params.visible_only && source.HasNormals();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Eigen::Vector3d p = pose.Apply(source.points[i]);
    if (cull && (pose.rotation * source.normals[i]).dot(p) > -params.min_view_cosine * p.norm()) {
      continue;
    }
    const auto nb = target.index->NearestWithin(p, params.max_correspondence_distance);
    if (!nb) continue;
    out.src.push_back(p);
    out.dst.push_back(target.cloud.points[nb->index]);
    if (with_normals) out.dst_normals.push_back(target.cloud.normals[nb->index]);
    out.sum_sq += nb->distance * nb->distance;
  }
}

}  // namespace

const char *ToString(IcpMethod m) {
  return m == IcpMethod::kPointToPlane ? "point-to-plane" : "point-to-point";
}

IcpMethod IcpMethodFromString(const std::string &s) {
  if (s == "point-to-plane") return IcpMethod::kPointToPlane;
  if (s == "point-to-point") return IcpMethod::kPointToPoint;
  throw ValidationError("unknown ICP method '" + s + "'");
}

void IcpParams::Validate() const {
  if (max_iterations <= 0) throw ValidationError("icp: max_iterations must be positive");
  if (!(max_correspondence_distance > 0.0)) {
    throw ValidationError("icp: max_correspondence_distance must be positive");
  }
  if (!(convergence_rmse_delta > 0.0)) {
    throw ValidationError("icp: convergence_rmse_delta must be positive");
  }
  if (sample_count < 100) throw ValidationError("icp: sample_count must be at least 100");
  if (normal_k <= 0) throw ValidationError("icp: normal_k must be positive");
  if (!(min_view_cosine >= 0.0 && min_view_cosine < 1.0)) {
    throw ValidationError("icp: min_view_cosine must be in [0, 1)");
  }
}

std::optional<RigidTransform> KabschAlign(const std::vector<Eigen::Vector3d> &src,
                                          const std::vector<Eigen::Vector3d> &dst) {
  if (src.size() != dst.size()) throw ValidationError("kabsch: point count mismatch");
  if (src.size() < 3) return std::nullopt;
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= static_cast<double>(src.size());
  md /= static_cast<double>(dst.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d a = src[i] - ms;
    h.noalias() += a * (dst[i] - md).transpose();
    spread.noalias() += a * a.transpose();
  }
  // Collinear (or coincident) sources leave a rotation unconstrained.
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(spread).eigenvalues();
  if (!(ev(1) > 1e-12 * std::max(ev(2), 1e-300))) return std::nullopt;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  RigidTransform out;
  out.rotation = v * d * u.transpose();
  out.translation = md - out.rotation * ms;
  return out;
}

std::optional<RigidTransform> PointToPlaneStep(const std::vector<Eigen::Vector3d> &src,
                                               const std::vector<Eigen::Vector3d> &dst,
                                               const std::vector<Eigen::Vector3d> &dst_normals) {
  if (src.size() != dst.size() || src.size() != dst_normals.size()) {
    throw ValidationError("point-to-plane: correspondence count mismatch");
  }
  if (src.size() < 6) return std::nullopt;
  // Linearize about the source centroid for conditioning.
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const auto &p : src) center += p;
  center /= static_cast<double>(src.size());

  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d &n = dst_normals[i];
    Eigen::Matrix<double, 6, 1> row;
    row.head<3>() = (src[i] - center).cross(n);
    row.tail<3>() = n;
    const double r = (src[i] - dst[i]).dot(n);
    ata.noalias() += row * row.transpose();
    atb.noalias() -= row * r;
  }
  const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(ata, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev(0) > 1e-12 * ev(5))) return std::nullopt;
  const Eigen::Matrix<double, 6, 1> x = ata.ldlt().solve(atb);
  if (!x.allFinite()) return std::nullopt;

  RigidTransform out;
  out.rotation = RotationFromVector(x.head<3>());
  out.translation = center - out.rotation * center + x.tail<3>();
  return out;
}

IcpTarget PrepareTarget(PointCloud cloud) {
  RequireValid(cloud);
  IcpTarget target;
  target.index = std::make_shared<const KdTree>(cloud.points);
  target.cloud = std::move(cloud);
  return target;
}

IcpTarget PrepareTarget(const DepthImage &depth, const CameraIntrinsics &k, const IcpParams &params) {
  params.Validate();
  IcpTarget target;
  target.cloud = Backproject(depth, k);
  auto index = std::make_shared<const KdTree>(target.cloud.points);
  if (params.method == IcpMethod::kPointToPlane &&
      target.cloud.size() >= static_cast<std::size_t>(params.normal_k) + 1) {
    target.cloud = EstimateNormals(target.cloud, *index, static_cast<std::size_t>(params.normal_k));
  }
  target.index = std::move(index);
  return target;
}

IcpResult RegisterToTarget(const PointCloud &source, const IcpTarget &target,
                           const RigidTransform &initial, const IcpParams &params) {
  params.Validate();
  RequireValid(initial, "icp initial pose");
  IcpResult result;
  result.refined_pose = initial;
  result.method_used = params.method == IcpMethod::kPointToPlane && target.cloud.HasNormals()
                           ? IcpMethod::kPointToPlane
                           : IcpMethod::kPointToPoint;
  if (target.cloud.size() < 3) {
    result.diagnostic = "target has fewer than 3 points";
    return result;
  }
  if (source.size() < 3) {
    result.diagnostic = "source has fewer than 3 points";
    return result;
  }
  const bool plane = result.method_used == IcpMethod::kPointToPlane;

  Correspondences corr;
  RigidTransform pose = initial;
  double previous = 0.0, before_previous = 0.0;
  bool rmse_converged = false;
  for (int iter = 0;; ++iter) {
    FindCorrespondences(source, target, pose, params, plane, corr);
    result.correspondence_count = corr.size();
    if (corr.size() < 3) {
      result.diagnostic = "fewer than 3 correspondences within " +
                          std::to_string(params.max_correspondence_distance) + " mm";
      break;
    }
    const double rmse = corr.Rmse();
    result.rmse = rmse;
    result.rmse_history.push_back(rmse);
    const double tol = params.convergence_rmse_delta * rmse;
    // A sample crossing the gate or view cull can make the iterates alternate
    // between two correspondence sets; a repeat two steps back also stops.
    if ((iter > 0 && std::abs(previous - rmse) <= tol) ||
        (iter > 1 && std::abs(before_previous - rmse) <= tol)) {
      rmse_converged = true;
      break;
    }
    if (iter == params.max_iterations) break;
    const auto step = plane ? PointToPlaneStep(corr.src, corr.dst, corr.dst_normals)
                            : KabschAlign(corr.src, corr.dst);
    if (!step) {
      result.diagnostic = "degenerate correspondences (collinear or rank-deficient)";
      break;
    }
    pose = Compose(*step, pose);
    result.iterations = iter + 1;
    before_previous = previous;
    previous = rmse;
  }
  result.refined_pose = pose;
  const double matched = static_cast<double>(corr.size()) / static_cast<double>(source.size());
  result.converged = rmse_converged && matched >= 0.1;
  return result;
}

IcpResult IcpRefine(const TriangleMesh &mesh, const DepthImage &scene_depth,
                    const CameraIntrinsics &k, const RigidTransform &initial_pose,
                    const IcpParams &params) {
  params.Validate();
  const PointCloud samples =
      SampleMeshSurface(mesh, static_cast<std::size_t>(params.sample_count), params.seed);
  const IcpTarget target = PrepareTarget(scene_depth, k, params);
  return RegisterToTarget(samples, target, initial_pose, params);
}

}  // namespace dtinspect
