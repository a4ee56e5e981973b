#include "dtinspect/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "dtinspect/error.hpp"

namespace dtinspect {

namespace {

constexpr double kDriftTolerance = 1e-9;

double OrthonormalityDrift(const Eigen::Matrix3d &r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace

RigidTransform RigidTransform::FromTranslation(const Eigen::Vector3d &t) {
  RigidTransform out;
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::FromAxisAngle(const Eigen::Vector3d &axis, double angle_rad,
                                             const Eigen::Vector3d &t) {
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
  out.translation = t;
  return out;
}

bool IsValid(const RigidTransform &t, double tolerance) {
  if (!t.rotation.allFinite() || !t.translation.allFinite()) return false;
  return OrthonormalityDrift(t.rotation) <= tolerance &&
         std::abs(t.rotation.determinant() - 1.0) <= tolerance;
}

void RequireValid(const RigidTransform &t, const char *what) {
  if (!IsValid(t)) {
    throw ValidationError(std::string(what) +
                          ": rotation is not orthonormal with determinant +1");
  }
}

Eigen::Matrix3d Orthonormalize(const Eigen::Matrix3d &r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

RigidTransform Compose(const RigidTransform &a, const RigidTransform &b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  if (OrthonormalityDrift(out.rotation) > kDriftTolerance) {
    out.rotation = Orthonormalize(out.rotation);
  }
  return out;
}

RigidTransform Invert(const RigidTransform &t) {
  RigidTransform out;
  out.rotation = t.rotation.transpose();
  out.translation = -(out.rotation * t.translation);
  return out;
}

Eigen::Matrix3d RotationFromVector(const Eigen::Vector3d &omega) {
  const double angle = omega.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

void RequireValid(const PointCloud &cloud) {
  if (!cloud.normals.empty()) {
    if (cloud.normals.size() != cloud.points.size()) {
      throw ValidationError("point cloud: normal count does not match point count");
    }
    for (const auto &n : cloud.normals) {
      if (std::abs(n.norm() - 1.0) > 1e-4) {
        throw ValidationError("point cloud: normal is not unit length");
      }
    }
  }
  if (!cloud.colors.empty() && cloud.colors.size() != cloud.points.size()) {
    throw ValidationError("point cloud: color count does not match point count");
  }
}

PointCloud TransformPoints(const PointCloud &cloud, const RigidTransform &t) {
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const auto &p : cloud.points) out.points.push_back(t.Apply(p));
  out.normals.reserve(cloud.normals.size());
  for (const auto &n : cloud.normals) out.normals.push_back(t.rotation * n);
  out.colors = cloud.colors;
  return out;
}

}  // namespace dtinspect
