#include "dtinspect/color.hpp"

#include <cmath>

namespace dtinspect {

namespace {

double SrgbToLinear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double LabF(double t) {
  constexpr double kEpsilon = 216.0 / 24389.0;  // (6/29)^3
  constexpr double kKappa = 24389.0 / 27.0;
  return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

}  // namespace

Lab RgbToLab(Rgb8 c) {
  const double r = SrgbToLinear(c.r / 255.0);
  const double g = SrgbToLinear(c.g / 255.0);
  const double b = SrgbToLinear(c.b / 255.0);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  // D65 reference white
  const double fx = LabF(x / 0.95047);
  const double fy = LabF(y / 1.00000);
  const double fz = LabF(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double DeltaE76(const Lab &x, const Lab &y) {
  const double dl = x.l - y.l, da = x.a - y.a, db = x.b - y.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

}  // namespace dtinspect
