#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcnoise/point.hpp"

namespace pcnoise {

struct Neighbor {
  std::size_t index;
  double squared_distance;
};

// Static 3-d tree over a borrowed cloud. The cloud must outlive the tree.
//
// Queries are exact. Results are ordered by (squared distance, index), so ties
// at equal distance always resolve to the lower point index.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud);

  // The k nearest points to cloud[query], excluding query itself.
  std::vector<Neighbor> nearest_excluding(std::size_t query,
                                          std::size_t k) const;

  std::size_t size() const noexcept { return cloud_->size(); }

  // Point indices in leaf order. Spatially close points are adjacent, which
  // makes this a cache-friendly query order.
  const std::vector<std::size_t>& leaf_order() const noexcept { return order_; }

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  const PointCloud* cloud_;
  std::vector<std::size_t> order_;
  // cloud_ copied into leaf order.
  std::vector<Point3> packed_;
  std::vector<Node> nodes_;
};

}  // namespace pcnoise
