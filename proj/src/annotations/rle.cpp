#include "dtinspect/rle.hpp"

#include <numeric>

namespace dtinspect {

Rle RleEncode(const BinaryMask &mask) {
  Rle rle;
  rle.width = mask.width;
  rle.height = mask.height;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      const std::uint8_t bit = mask.at(x, y) ? 1 : 0;
      if (bit != current) {
        rle.counts.push_back(run);
        run = 0;
        current = bit;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask RleDecode(const Rle &rle) {
  const std::uint64_t total =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  const std::uint64_t expected = static_cast<std::uint64_t>(rle.width) * rle.height;
  if (rle.width < 0 || rle.height < 0 || total != expected) {
    throw ValidationError("rle: runs sum to " + std::to_string(total) + " but mask has " +
                          std::to_string(expected) + " pixels");
  }
  BinaryMask mask(rle.width, rle.height);
  std::uint64_t pos = 0;
  std::uint8_t bit = 0;
  for (std::uint32_t run : rle.counts) {
    if (bit) {
      for (std::uint64_t i = pos; i < pos + run; ++i) {
        mask.at(static_cast<int>(i / rle.height), static_cast<int>(i % rle.height)) = 1;
      }
    }
    pos += run;
    bit ^= 1;
  }
  return mask;
}

std::uint64_t RleArea(const Rle &rle) {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

}  // namespace dtinspect
