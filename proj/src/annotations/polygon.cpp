#include <algorithm>
#include <cmath>
#include <map>

#include "dtinspect/annotations.hpp"

namespace dtinspect {

namespace {

// Crossing x of edge (a, b) with the horizontal line y = yc, when the edge
// spans it under the half-open rule [min_y, max_y).
bool Crossing(const Eigen::Vector2d &a, const Eigen::Vector2d &b, double yc, double &x) {
  if ((a.y() <= yc) == (b.y() <= yc)) return false;
  x = a.x() + (yc - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
  return true;
}

void FillRings(const std::vector<Polygon> &rings, BinaryMask &mask) {
  std::vector<double> xs;
  for (int y = 0; y < mask.height; ++y) {
    const double yc = y + 0.5;
    xs.clear();
    for (const Polygon &ring : rings) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        double x;
        if (Crossing(ring[i], ring[(i + 1) % ring.size()], yc, x)) xs.push_back(x);
      }
    }
    std::sort(xs.begin(), xs.end());
    // A center xc is inside when an odd number of crossings lie right of it,
    // i.e. xc in [xs[2i], xs[2i+1]).
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int x1 = std::min(mask.width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
      for (int x = x0; x <= x1; ++x) mask.at(x, y) = 1;
    }
  }
}

void RequireRing(const Polygon &polygon) {
  if (polygon.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
  if (ShoelaceArea(polygon) == 0.0) throw ValidationError("degenerate polygon (zero area)");
}

}  // namespace

double ShoelaceArea(const Polygon &polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto &a = polygon[i];
    const auto &b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2.0;
}

BinaryMask PolygonToMask(const Polygon &polygon, int width, int height) {
  RequireRing(polygon);
  BinaryMask mask(width, height);
  FillRings({polygon}, mask);
  return mask;
}

BinaryMask PolygonsToMask(const std::vector<Polygon> &rings, int width, int height) {
  for (const Polygon &r : rings) RequireRing(r);
  BinaryMask mask(width, height);
  FillRings(rings, mask);
  return mask;
}

std::vector<Polygon> MaskToPolygons(const BinaryMask &mask) {
  // Directed unit edges along pixel borders with the set region on the left
  // (in y-down image coordinates), keyed by their start corner.
  using Corner = std::pair<int, int>;
  std::multimap<Corner, Corner> edges;
  auto set = [&](int x, int y) { return mask.Contains(x, y) && mask.at(x, y) != 0; };
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!set(x, y)) continue;
      if (!set(x, y - 1)) edges.emplace(Corner{x + 1, y}, Corner{x, y});
      if (!set(x - 1, y)) edges.emplace(Corner{x, y}, Corner{x, y + 1});
      if (!set(x, y + 1)) edges.emplace(Corner{x, y + 1}, Corner{x + 1, y + 1});
      if (!set(x + 1, y)) edges.emplace(Corner{x + 1, y + 1}, Corner{x + 1, y});
    }
  }
  std::vector<Polygon> rings;
  while (!edges.empty()) {
    auto it = edges.begin();
    const Corner start = it->first;
    std::vector<Corner> loop{start};
    Corner cursor = it->second;
    edges.erase(it);
    while (cursor != start) {
      loop.push_back(cursor);
      auto next = edges.find(cursor);
      if (next == edges.end()) break;  // cannot happen for a closed boundary
      cursor = next->second;
      edges.erase(next);
    }
    // Drop corners where the boundary continues straight.
    Polygon ring;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Corner &p = loop[(i + n - 1) % n], &c = loop[i], &q = loop[(i + 1) % n];
      const long cross = static_cast<long>(c.first - p.first) * (q.second - c.second) -
                         static_cast<long>(c.second - p.second) * (q.first - c.first);
      if (cross != 0) ring.emplace_back(c.first, c.second);
    }
    if (ring.size() >= 3) rings.push_back(std::move(ring));
  }
  return rings;
}

BinaryMask AnnotationMask(const DefectAnnotation &annotation, int width, int height) {
  if (annotation.mask) {
    if (annotation.mask->width != width || annotation.mask->height != height) {
      throw ValidationError("annotation " + std::to_string(annotation.id) +
                            ": mask size does not match image size");
    }
    return RleDecode(*annotation.mask);
  }
  return PolygonsToMask(annotation.polygons, width, height);
}

DefectAnnotation MakeAnnotation(int id, int image_id, const DefectCategory &category,
                                const BinaryMask &mask) {
  DefectAnnotation a;
  a.id = id;
  a.image_id = image_id;
  a.category_id = category.id;
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  std::size_t area = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      ++area;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (area == 0) throw ValidationError("annotation " + std::to_string(id) + ": empty mask");
  a.area = static_cast<double>(area);
  a.bbox = {static_cast<double>(min_x), static_cast<double>(min_y),
            static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
  if (category.supercategory == Supercategory::kLogical) {
    a.polygons = MaskToPolygons(mask);
  } else {
    a.mask = RleEncode(mask);
  }
  return a;
}

}  // namespace dtinspect
