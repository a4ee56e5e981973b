#pragma once

// Shared by every kernel translation unit. Keep this header free of inline
// functions: it is included from TUs compiled with different ISA flags.

namespace dtinspect::simd::detail {

// sRGB -> XYZ (D65), rows pre-divided by the reference white so that the
// CIELAB nonlinearity applies directly.
constexpr float kXn = 0.95047f;
constexpr float kYn = 1.00000f;
constexpr float kZn = 1.08883f;

constexpr float kM00 = 0.4124564f / kXn, kM01 = 0.3575761f / kXn, kM02 = 0.1804375f / kXn;
constexpr float kM10 = 0.2126729f / kYn, kM11 = 0.7151522f / kYn, kM12 = 0.0721750f / kYn;
constexpr float kM20 = 0.0193339f / kZn, kM21 = 0.1191920f / kZn, kM22 = 0.9503041f / kZn;

// (6/29)^3, 1 / (3 (6/29)^2), 4/29
constexpr float kLabEpsilon = 216.0f / 24389.0f;
constexpr float kLabSlope = 841.0f / 108.0f;
constexpr float kLabOffset = 4.0f / 29.0f;

}  // namespace dtinspect::simd::detail

namespace dtinspect::simd {
/// 256-entry sRGB -> linear table, computed in double precision.
const float *SrgbToLinearTable();
}  // namespace dtinspect::simd
