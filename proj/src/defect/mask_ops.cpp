#include <algorithm>

#include "dtinspect/defect.hpp"
#include "dtinspect/simd/kernels.hpp"

namespace dtinspect {

namespace {

// Window counts along rows, then along columns. With erode=true a pixel
// survives when every in-image neighbor is set; otherwise when any is.
BinaryMask Morph(const BinaryMask &mask, int radius, bool erode) {
  if (radius <= 0) return mask;
  const int w = mask.width, h = mask.height;
  BinaryMask horizontal(w, h), out(w, h);
  std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + mask.at(x, y);
    for (int x = 0; x < w; ++x) {
      const int lo = std::max(0, x - radius), hi = std::min(w - 1, x + radius);
      const int count = prefix[hi + 1] - prefix[lo];
      horizontal.at(x, y) = erode ? (count == hi - lo + 1) : (count > 0);
    }
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + horizontal.at(x, y);
    for (int y = 0; y < h; ++y) {
      const int lo = std::max(0, y - radius), hi = std::min(h - 1, y + radius);
      const int count = prefix[hi + 1] - prefix[lo];
      out.at(x, y) = erode ? (count == hi - lo + 1) : (count > 0);
    }
  }
  return out;
}

}  // namespace

BinaryMask Threshold(const DisparityMap &map, double tau) {
  if (!(tau > 0.0)) throw ValidationError("threshold: tau must be positive");
  RequireSameShape(map.values, map.valid, "threshold");
  BinaryMask out(map.width(), map.height());
  simd::ActiveKernels().threshold(map.values.data.data(), map.valid.data.data(),
                                  static_cast<float>(tau), out.data.data(), out.size());
  return out;
}

BinaryMask Erode(const BinaryMask &mask, int radius) { return Morph(mask, radius, true); }
BinaryMask Dilate(const BinaryMask &mask, int radius) { return Morph(mask, radius, false); }

BinaryMask MorphologicalClean(const BinaryMask &mask, int radius) {
  if (radius < 0) throw ValidationError("morphological_clean: radius must be >= 0");
  if (radius == 0) return mask;
  const BinaryMask opened = Dilate(Erode(mask, radius), radius);
  return Erode(Dilate(opened, radius), radius);
}

double Iou(const BinaryMask &a, const BinaryMask &b) {
  RequireSameShape(a, b, "iou");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a.data[i] != 0, y = b.data[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t CountSet(const BinaryMask &mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data.begin(), mask.data.end(), [](std::uint8_t v) { return v != 0; }));
}

BinaryMask Union(const BinaryMask &a, const BinaryMask &b) {
  RequireSameShape(a, b, "union");
  BinaryMask out(a.width, a.height);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = (a.data[i] || b.data[i]) ? 1 : 0;
  return out;
}

BinaryMask RegionsMask(const std::vector<DefectRegion> &regions, int width, int height) {
  BinaryMask out(width, height);
  for (const DefectRegion &r : regions) out = Union(out, RleDecode(r.pixels));
  return out;
}

}  // namespace dtinspect
