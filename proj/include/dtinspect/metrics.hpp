#pragma once

#include <vector>

#include "dtinspect/geometry.hpp"

namespace dtinspect {

struct PoseError {
  double rotation_deg = 0.0;
  double translation_mm = 0.0;
  double add_mm = 0.0;
};

struct ThresholdCurve {
  std::vector<double> thresholds;     // ascending, mm
  std::vector<double> success_rates;  // fraction of errors strictly below each threshold
};

/// Mean distance between model points under the two poses.
double AddMetric(const PointCloud &model_points, const RigidTransform &estimated,
                 const RigidTransform &ground_truth);
double AddMetric(const std::vector<Eigen::Vector3d> &model_points, const RigidTransform &estimated,
                 const RigidTransform &ground_truth);

/// Geodesic angle between two rotations in degrees; equals
/// 2 asin(||a - b||_F / (2 sqrt 2)). Throws on non-orthonormal input.
double RotationErrorDeg(const Eigen::Matrix3d &a, const Eigen::Matrix3d &b);

double TranslationErrorMm(const Eigen::Vector3d &a, const Eigen::Vector3d &b);

PoseError ComputePoseError(const std::vector<Eigen::Vector3d> &model_points,
                           const RigidTransform &estimated, const RigidTransform &ground_truth);

/// Thresholds must be positive and ascending; errors non-empty.
ThresholdCurve SuccessCurve(const std::vector<double> &errors, const std::vector<double> &thresholds);

}  // namespace dtinspect
