#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace dtinspect {

/// Rigid 6D pose. Rotation is a full 3x3 matrix, translation in millimeters.
/// Applying the transform maps p to rotation * p + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform Identity() { return {}; }
  static RigidTransform FromTranslation(const Eigen::Vector3d &t);
  static RigidTransform FromAxisAngle(const Eigen::Vector3d &axis,
                                      double angle_rad,
                                      const Eigen::Vector3d &t = Eigen::Vector3d::Zero());

  Eigen::Vector3d Apply(const Eigen::Vector3d &p) const {
    return rotation * p + translation;
  }
};

constexpr double kRotationTolerance = 1e-6;

/// True when rotation is orthonormal with det +1 (both within 1e-6).
bool IsValid(const RigidTransform &t, double tolerance = kRotationTolerance);

/// Throws ValidationError naming `what` if the transform is not rigid.
void RequireValid(const RigidTransform &t, const char *what = "pose");

/// Result applies b first, then a.
RigidTransform Compose(const RigidTransform &a, const RigidTransform &b);
RigidTransform Invert(const RigidTransform &t);

/// Projects the rotation onto SO(3) through SVD.
Eigen::Matrix3d Orthonormalize(const Eigen::Matrix3d &r);

/// Exact rotation for the rotation vector omega (axis * angle).
Eigen::Matrix3d RotationFromVector(const Eigen::Vector3d &omega);

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;  // empty or one per point
  std::vector<Eigen::Vector3d> colors;   // empty or one per point, sRGB in [0,1]

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool HasNormals() const { return !normals.empty(); }
};

/// Checks normal count and unit length (1e-4).
void RequireValid(const PointCloud &cloud);

/// p' = R p + t for points; normals are rotated only.
PointCloud TransformPoints(const PointCloud &cloud, const RigidTransform &t);

}  // namespace dtinspect
