#include <algorithm>
#include <cstdint>
#include <limits>

#include "dtinspect/defect.hpp"

namespace dtinspect {

std::vector<DefectRegion> ConnectedComponents(const BinaryMask &mask, std::size_t min_area,
                                              const DisparityMap &source) {
  if (min_area < 1) throw ValidationError("connected_components: min_area must be >= 1");
  RequireSameShape(mask, source.values, "connected_components");
  const int w = mask.width, h = mask.height;
  constexpr std::uint32_t kUnlabeled = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(mask.size(), kUnlabeled);
  std::vector<std::uint32_t> stack;
  std::vector<int> pixels;

  struct Found {
    DefectRegion region;
    std::size_t order;
  };
  std::vector<Found> found;
  std::uint32_t next = 0;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
      if (!mask.data[seed] || label[seed] != kUnlabeled) continue;
      const std::uint32_t id = next++;
      pixels.clear();
      stack.assign(1, static_cast<std::uint32_t>(seed));
      label[seed] = id;
      while (!stack.empty()) {
        const std::uint32_t p = stack.back();
        stack.pop_back();
        pixels.push_back(static_cast<int>(p));
        const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (mask.data[q] && label[q] == kUnlabeled) {
              label[q] = id;
              stack.push_back(static_cast<std::uint32_t>(q));
            }
          }
        }
      }
      if (pixels.size() < min_area) continue;

      DefectRegion region;
      region.channel = source.channel;
      region.area = pixels.size();
      int min_x = w, min_y = h, max_x = -1, max_y = -1;
      double sx = 0.0, sy = 0.0, score = 0.0;
      BinaryMask bits(w, h);
      for (int p : pixels) {
        const int px = p % w, py = p / w;
        min_x = std::min(min_x, px);
        max_x = std::max(max_x, px);
        min_y = std::min(min_y, py);
        max_y = std::max(max_y, py);
        sx += px;
        sy += py;
        score += source.values.data[p];
        bits.data[p] = 1;
      }
      const double n = static_cast<double>(pixels.size());
      region.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      region.centroid = {sx / n, sy / n};
      region.score = score / n;
      region.pixels = RleEncode(bits);
      found.push_back({std::move(region), found.size()});
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Found &a, const Found &b) { return a.region.area > b.region.area; });
  std::vector<DefectRegion> out;
  out.reserve(found.size());
  for (Found &f : found) out.push_back(std::move(f.region));
  return out;
}

}  // namespace dtinspect
