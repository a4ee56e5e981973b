#pragma once

#include <cstdint>
#include <vector>

#include "dtinspect/image.hpp"

namespace dtinspect {

/// Uncompressed COCO run-length encoding: column-major runs, alternating
/// zeros and ones, always starting with a (possibly empty) zero run.
struct Rle {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const Rle &, const Rle &) = default;
};

Rle RleEncode(const BinaryMask &mask);
/// Throws ValidationError when the runs do not sum to width * height.
BinaryMask RleDecode(const Rle &rle);
std::uint64_t RleArea(const Rle &rle);

}  // namespace dtinspect
