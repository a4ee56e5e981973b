#pragma once

#include <Eigen/Core>
#include <optional>

#include "dtinspect/geometry.hpp"
#include "dtinspect/image.hpp"

namespace dtinspect {

/// Pinhole intrinsics, BOP axes: +Z forward, +X right, +Y down, origin at
/// the top-left pixel. Pixel (u, v) is sampled at projected coordinate (u, v).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void Validate() const;
  friend bool operator==(const CameraIntrinsics &, const CameraIntrinsics &) = default;
};

/// std::nullopt when the point is behind the camera (z <= 0).
std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d &p, const CameraIntrinsics &k);

/// One point per valid depth pixel, row-major order.
PointCloud Backproject(const DepthImage &depth, const CameraIntrinsics &k);

}  // namespace dtinspect
