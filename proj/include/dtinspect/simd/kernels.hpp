#pragma once

// Per-pixel inner loops behind the disparity and thresholding stages.
// Every kernel has a scalar reference implementation; vector variants are
// selected at runtime and must agree with it (bit-exact for the depth and
// threshold kernels, within 1e-3 for the CIELAB kernels).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dtinspect::simd {

struct KernelTable {
  std::string_view isa;

  /// out = |render - real| where both depths are finite and > 0, else 0.
  /// valid receives 1/0 accordingly.
  void (*depth_abs_diff)(const float *render, const float *real, float *out,
                         std::uint8_t *valid, std::size_t n);

  /// Interleaved 8-bit sRGB to planar CIELAB (D65, 2 degree observer).
  void (*rgb_to_lab)(const std::uint8_t *rgb, float *l, float *a, float *b, std::size_t n);

  /// CIE76 distance between two interleaved sRGB images where mask != 0;
  /// elsewhere out = 0 and valid = 0.
  void (*delta_e76)(const std::uint8_t *rgb_a, const std::uint8_t *rgb_b,
                    const std::uint8_t *mask, float *out, std::uint8_t *valid, std::size_t n);

  /// bits = (valid != 0 && value >= tau).
  void (*threshold)(const float *values, const std::uint8_t *valid, float tau,
                    std::uint8_t *bits, std::size_t n);
};

const KernelTable &ScalarKernels();

/// nullptr when not compiled in or not supported by the running CPU.
const KernelTable *Avx2Kernels();
const KernelTable *NeonKernels();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable *> AvailableKernels();

/// Best available table. The DTINSPECT_ISA environment variable
/// (scalar | avx2 | neon) forces a choice when that table is available.
const KernelTable &ActiveKernels();

}  // namespace dtinspect::simd
