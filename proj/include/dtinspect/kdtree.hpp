#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace dtinspect {

/// Exact nearest-neighbor index over a static 3D point set. Ties on
/// distance resolve to the smallest original index, so results match an
/// exhaustive scan exactly.
class KdTree {
 public:
  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  explicit KdTree(const std::vector<Eigen::Vector3d> &points, int leaf_size = 8);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Throws ValidationError on an empty index.
  Neighbor Nearest(const Eigen::Vector3d &query) const;
  /// Nearest point with distance <= max_distance, if any.
  std::optional<Neighbor> NearestWithin(const Eigen::Vector3d &query, double max_distance) const;
  /// Up to k neighbors sorted by ascending (distance, index).
  std::vector<Neighbor> KNearest(const Eigen::Vector3d &query, std::size_t k) const;

 private:
  struct Node {
    std::int32_t axis = -1;  // -1 for leaves
    double split = 0.0;
    std::uint32_t left = 0, right = 0;
    std::uint32_t begin = 0, end = 0;
  };

  std::uint32_t Build(std::uint32_t begin, std::uint32_t end, int leaf_size);

  struct Best {
    double d2;
    std::uint32_t index;
  };
  void SearchNearest(std::uint32_t node, const Eigen::Vector3d &q, Best &best) const;
  void SearchK(std::uint32_t node, const Eigen::Vector3d &q, std::size_t k,
               std::vector<Best> &heap) const;

  std::vector<Eigen::Vector3d> points_;  // permuted into leaf order
  std::vector<std::uint32_t> index_;     // permuted slot -> original index
  std::vector<Node> nodes_;
};

}  // namespace dtinspect
