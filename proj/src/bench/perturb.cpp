#include <cmath>
#include <numbers>
#include <random>

#include "dtinspect/bench.hpp"
#include "dtinspect/error.hpp"

namespace dtinspect {

namespace {

// [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so tables reproduce across toolchains.
double Unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::Vector3d UnitSphere(std::mt19937_64 &rng) {
  const double z = 2.0 * Unit(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * Unit(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

void PerturbationSpec::Validate() const {
  if (count < 0) throw ValidationError("perturbation count must be non-negative");
  if (!(max_rotation_deg >= 0.0) || !(max_translation_mm >= 0.0)) {
    throw ValidationError("perturbation ranges must be non-negative");
  }
}

RigidTransform PerturbPose(const RigidTransform &gt, const PerturbationSpec &spec,
                           std::uint64_t index) {
  spec.Validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const Eigen::Vector3d axis = UnitSphere(rng);
  const double angle = Unit(rng) * spec.max_rotation_deg * std::numbers::pi / 180.0;
  const Eigen::Vector3d dir = UnitSphere(rng);
  const double dist = Unit(rng) * spec.max_translation_mm;
  if (angle == 0.0 && dist == 0.0) return gt;
  RigidTransform out;
  out.rotation = gt.rotation * RotationFromVector(axis * angle);
  out.translation = gt.translation + dir * dist;
  return out;
}

std::vector<double> DefaultThresholds() { return {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0}; }

}  // namespace dtinspect
