#include "dtinspect/camera.hpp"

#include <string>

#include "dtinspect/error.hpp"

namespace dtinspect {

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ValidationError("intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw ValidationError("intrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ValidationError("intrinsics: principal point outside image (" +
                          std::to_string(cx) + ", " + std::to_string(cy) + ")");
  }
}

std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d &p, const CameraIntrinsics &k) {
  if (!(p.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

PointCloud Backproject(const DepthImage &depth, const CameraIntrinsics &k) {
  if (depth.width != k.width || depth.height != k.height) {
    throw ValidationError("backproject: depth image is " + std::to_string(depth.width) +
                          "x" + std::to_string(depth.height) + " but intrinsics expect " +
                          std::to_string(k.width) + "x" + std::to_string(k.height));
  }
  PointCloud cloud;
  const double inv_fx = 1.0 / k.fx;
  const double inv_fy = 1.0 / k.fy;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const float d = depth.at(u, v);
      if (!IsValidDepth(d)) continue;
      const double z = d;
      cloud.points.emplace_back((u - k.cx) * z * inv_fx, (v - k.cy) * z * inv_fy, z);
    }
  }
  return cloud;
}

}  // namespace dtinspect
