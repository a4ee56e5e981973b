#include "dtinspect/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dtinspect/error.hpp"

namespace dtinspect {

namespace {

inline bool Better(double d2, std::uint32_t idx, double best_d2, std::uint32_t best_idx) {
  return d2 < best_d2 || (d2 == best_d2 && idx < best_idx);
}

struct HeapLess {
  template <typename B>
  bool operator()(const B &a, const B &b) const {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
  }
};

}  // namespace

KdTree::KdTree(const std::vector<Eigen::Vector3d> &points, int leaf_size) {
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("kd-tree: too many points");
  }
  points_ = points;
  index_.resize(points.size());
  std::iota(index_.begin(), index_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / std::max(1, leaf_size) + 1);
    Build(0, static_cast<std::uint32_t>(points_.size()), std::max(1, leaf_size));
    std::vector<Eigen::Vector3d> permuted(points_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) permuted[i] = points[index_[i]];
    points_ = std::move(permuted);
  }
}

std::uint32_t KdTree::Build(std::uint32_t begin, std::uint32_t end, int leaf_size) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= static_cast<std::uint32_t>(leaf_size)) return id;

  Eigen::Vector3d lo = points_[index_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[index_[i]]);
    hi = hi.cwiseMax(points_[index_[i]]);
  }
  int axis;
  const double spread = (hi - lo).maxCoeff(&axis);
  if (spread == 0.0) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[index_[mid]][axis];
  const std::uint32_t left = Build(begin, mid, leaf_size);
  const std::uint32_t right = Build(mid, end, leaf_size);
  Node &node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::SearchNearest(std::uint32_t id, const Eigen::Vector3d &q, Best &best) const {
  const Node &node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double d2 = (points_[i] - q).squaredNorm();
      if (Better(d2, index_[i], best.d2, best.index)) best = {d2, index_[i]};
    }
    return;
  }
  // Left holds values <= split, right holds values >= split.
  const double diff = q[node.axis] - node.split;
  const std::uint32_t first = diff <= 0.0 ? node.left : node.right;
  const std::uint32_t second = diff <= 0.0 ? node.right : node.left;
  SearchNearest(first, q, best);
  if (diff * diff <= best.d2) SearchNearest(second, q, best);
}

void KdTree::SearchK(std::uint32_t id, const Eigen::Vector3d &q, std::size_t k,
                     std::vector<Best> &heap) const {
  const Node &node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const Best cand{(points_[i] - q).squaredNorm(), index_[i]};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), HeapLess{});
      } else if (HeapLess{}(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), HeapLess{});
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), HeapLess{});
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::uint32_t first = diff <= 0.0 ? node.left : node.right;
  const std::uint32_t second = diff <= 0.0 ? node.right : node.left;
  SearchK(first, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.front().d2) SearchK(second, q, k, heap);
}

KdTree::Neighbor KdTree::Nearest(const Eigen::Vector3d &query) const {
  if (empty()) throw ValidationError("nearest neighbor: empty target");
  Best best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::uint32_t>::max()};
  SearchNearest(0, query, best);
  return {best.index, std::sqrt(best.d2)};
}

std::optional<KdTree::Neighbor> KdTree::NearestWithin(const Eigen::Vector3d &query,
                                                      double max_distance) const {
  if (empty()) return std::nullopt;
  Best best{max_distance * max_distance, std::numeric_limits<std::uint32_t>::max()};
  SearchNearest(0, query, best);
  if (best.index == std::numeric_limits<std::uint32_t>::max()) return std::nullopt;
  return Neighbor{best.index, std::sqrt(best.d2)};
}

std::vector<KdTree::Neighbor> KdTree::KNearest(const Eigen::Vector3d &query, std::size_t k) const {
  std::vector<Neighbor> out;
  if (empty() || k == 0) return out;
  std::vector<Best> heap;
  heap.reserve(k + 1);
  SearchK(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end(), HeapLess{});
  out.reserve(heap.size());
  for (const Best &b : heap) out.push_back({b.index, std::sqrt(b.d2)});
  return out;
}

}  // namespace dtinspect
