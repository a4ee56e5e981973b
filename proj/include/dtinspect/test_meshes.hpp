#pragma once

#include "dtinspect/camera.hpp"
#include "dtinspect/geometry.hpp"
#include "dtinspect/mesh.hpp"

namespace dtinspect {

struct SuperellipsoidParams {
  Eigen::Vector3d semi_axes{50.0, 35.0, 25.0};  // mm
  double exponent = 4.0;                        // >= 1 keeps the solid convex
  int subdivisions = 20;                        // per cube face edge
};

/// Closed convex solid |x/a|^e + |y/b|^e + |z/c|^e = 1, triangulated from a
/// subdivided cube (12 * subdivisions^2 triangles), with a color gradient.
TriangleMesh MakeSuperellipsoid(const SuperellipsoidParams &p = {});

/// Axial-flux stator mock-up: a base disk ("base") carrying 12 coil blocks
/// ("coil_00".."coil_11") with subdivided top faces. Model z is up.
TriangleMesh MakeAxialMotor();

/// Axis-aligned box [lo, hi] with `top_cells` x `top_cells` grid on the +z face.
TriangleMesh MakeBox(const Eigen::Vector3d &lo, const Eigen::Vector3d &hi, int top_cells = 1);

/// 640x480, f = 600 px, principal point at the image center.
CameraIntrinsics DefaultIntrinsics();
/// Generic viewing pose for the superellipsoid at 400 mm.
RigidTransform DefaultObjectPose();
/// Motor top tilted 25 degrees toward the camera at 400 mm.
RigidTransform DefaultMotorPose();

}  // namespace dtinspect
