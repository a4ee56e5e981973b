#pragma once

#include <string>

#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/image.hpp"
#include "dtinspect/mesh.hpp"

namespace dtinspect {

struct RgbdFrame {
  ColorImage color;
  DepthImage depth;
  CameraIntrinsics intrinsics;

  /// Color and depth must both be intrinsics.width x intrinsics.height.
  void Validate() const;
};

struct RenderOptions {
  bool cull_back_faces = false;
  /// Triangles are clipped against z = near_plane_mm.
  double near_plane_mm = 1.0;
};

/// Uniform color used for meshes without vertex colors.
inline constexpr Rgb8 kUntexturedGray{128, 128, 128};

/// Z-buffered rasterization of the mesh seen from `pose` (model to camera).
/// Uncovered pixels keep depth 0 (invalid) and black color. Depth is the
/// camera-space z of the nearest surface.
RgbdFrame RenderRgbd(const TriangleMesh &mesh, const RigidTransform &pose,
                     const CameraIntrinsics &k, const RenderOptions &options = {});

/// Same depth as RenderRgbd, bit for bit, without color interpolation.
DepthImage RenderDepthOnly(const TriangleMesh &mesh, const RigidTransform &pose,
                           const CameraIntrinsics &k, const RenderOptions &options = {});

/// 16-bit depth codec: stored = round(mm / depth_scale), 0 = invalid.
/// Throws ValidationError when a depth does not fit in 16 bits.
Image<std::uint16_t> QuantizeDepth(const DepthImage &depth, double depth_scale);
DepthImage DequantizeDepth(const Image<std::uint16_t> &stored, double depth_scale);

/// Color as 8-bit RGB PNG, depth as 16-bit gray PNG.
void WriteFrame(const RgbdFrame &frame, double depth_scale, const std::string &color_path,
                const std::string &depth_path);
DepthImage ReadDepthPng(const std::string &path, double depth_scale);

}  // namespace dtinspect
