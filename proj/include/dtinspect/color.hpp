#pragma once

#include "dtinspect/image.hpp"

namespace dtinspect {

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// 8-bit sRGB to CIELAB: piecewise sRGB gamma (threshold 0.04045), linear
/// RGB to XYZ under D65 (2 degree observer), XYZ to L*a*b*.
Lab RgbToLab(Rgb8 c);

/// CIE76 color difference: Euclidean distance in L*a*b*.
double DeltaE76(const Lab &x, const Lab &y);

}  // namespace dtinspect
