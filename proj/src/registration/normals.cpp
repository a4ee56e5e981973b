#include <Eigen/Eigenvalues>

#include "dtinspect/error.hpp"
#include "dtinspect/registration.hpp"

namespace dtinspect {

PointCloud EstimateNormals(const PointCloud &cloud, std::size_t k) {
  if (k == 0) throw ValidationError("estimate_normals: k must be positive");
  if (cloud.size() < k + 1) {
    throw ValidationError("estimate_normals: need at least " + std::to_string(k + 1) +
                          " points, got " + std::to_string(cloud.size()));
  }
  const KdTree index(cloud.points);
  return EstimateNormals(cloud, index, k);
}

PointCloud EstimateNormals(const PointCloud &cloud, const KdTree &index, std::size_t k) {
  if (k == 0) throw ValidationError("estimate_normals: k must be positive");
  if (cloud.size() < k + 1 || index.size() != cloud.size()) {
    throw ValidationError("estimate_normals: need at least " + std::to_string(k + 1) +
                          " points, got " + std::to_string(cloud.size()));
  }
  PointCloud out = cloud;
  out.normals.resize(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d &p = cloud.points[i];
    const auto neighbors = index.KNearest(p, k + 1);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto &nb : neighbors) mean += cloud.points[nb.index];
    mean /= static_cast<double>(neighbors.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto &nb : neighbors) {
      const Eigen::Vector3d d = cloud.points[nb.index] - mean;
      cov.noalias() += d * d.transpose();
    }
    solver.compute(cov);
    Eigen::Vector3d n = solver.eigenvectors().col(0);
    if (n.dot(-p) < 0.0) n = -n;
    out.normals[i] = n.normalized();
  }
  return out;
}

}  // namespace dtinspect
