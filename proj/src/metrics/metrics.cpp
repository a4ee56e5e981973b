#include "dtinspect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dtinspect/error.hpp"

namespace dtinspect {

double AddMetric(const std::vector<Eigen::Vector3d> &model_points, const RigidTransform &estimated,
                 const RigidTransform &ground_truth) {
  if (model_points.empty()) throw ValidationError("add: empty model point set");
  double sum = 0.0;
  for (const auto &p : model_points) sum += (estimated.Apply(p) - ground_truth.Apply(p)).norm();
  return sum / static_cast<double>(model_points.size());
}

double AddMetric(const PointCloud &model_points, const RigidTransform &estimated,
                 const RigidTransform &ground_truth) {
  return AddMetric(model_points.points, estimated, ground_truth);
}

double RotationErrorDeg(const Eigen::Matrix3d &a, const Eigen::Matrix3d &b) {
  RigidTransform ta, tb;
  ta.rotation = a;
  tb.rotation = b;
  RequireValid(ta, "rotation_error a");
  RequireValid(tb, "rotation_error b");
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

double TranslationErrorMm(const Eigen::Vector3d &a, const Eigen::Vector3d &b) {
  return (a - b).norm();
}

PoseError ComputePoseError(const std::vector<Eigen::Vector3d> &model_points,
                           const RigidTransform &estimated, const RigidTransform &ground_truth) {
  return {RotationErrorDeg(estimated.rotation, ground_truth.rotation),
          TranslationErrorMm(estimated.translation, ground_truth.translation),
          AddMetric(model_points, estimated, ground_truth)};
}

ThresholdCurve SuccessCurve(const std::vector<double> &errors, const std::vector<double> &thresholds) {
  if (errors.empty()) throw ValidationError("success_curve: empty error list");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw ValidationError("success_curve: thresholds must be positive and ascending");
    }
  }
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  ThresholdCurve curve;
  curve.thresholds = thresholds;
  for (double t : thresholds) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    curve.success_rates.push_back(static_cast<double>(below) / static_cast<double>(sorted.size()));
  }
  return curve;
}

}  // namespace dtinspect
