#include "pcnoise/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "pcnoise/error.hpp"

namespace pcnoise {

namespace {

constexpr std::uint32_t kLeafSize = 16;

double coord(const Point3& p, int axis) {
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) {
    return a.squared_distance < b.squared_distance;
  }
  return a.index < b.index;
}

// Bounded candidate list kept sorted by closer().
class Candidates {
 public:
  explicit Candidates(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  bool full() const { return items_.size() == k_; }
  double worst() const {
    return full() ? items_.back().squared_distance
                  : std::numeric_limits<double>::infinity();
  }

  void offer(const Neighbor& n) {
    if (full() && !closer(n, items_.back())) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), n, closer);
    items_.insert(pos, n);
    if (items_.size() > k_) items_.pop_back();
  }

  std::vector<Neighbor> take() && { return std::move(items_); }

 private:
  std::size_t k_;
  std::vector<Neighbor> items_;
};

}  // namespace

KdTree::KdTree(const PointCloud& cloud) : cloud_(&cloud) {
  if (cloud.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "cloud too large for KdTree");
  }
  order_.resize(cloud.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!order_.empty()) build(0, static_cast<std::uint32_t>(order_.size()));
  packed_.reserve(order_.size());
  for (auto idx : order_) packed_.push_back(cloud[idx]);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = (*cloud_)[order_[begin]];
  Point3 hi = lo;
  for (auto i = begin + 1; i < end; ++i) {
    const auto& p = (*cloud_)[order_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Point3 extent = hi - lo;
  int axis = 0;
  if (extent.y > extent.x) axis = 1;
  if (extent.z > coord(extent, axis)) axis = 2;

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::size_t a, std::size_t b) {
                     const double ca = coord((*cloud_)[a], axis);
                     const double cb = coord((*cloud_)[b], axis);
                     return ca != cb ? ca < cb : a < b;
                   });
  const double split = coord((*cloud_)[order_[mid]], axis);
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  auto& node = nodes_[id];
  node.axis = static_cast<std::uint8_t>(axis);
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<Neighbor> KdTree::nearest_excluding(std::size_t query,
                                                std::size_t k) const {
  if (query >= cloud_->size()) {
    throw Error(ErrorCode::kInvalidArgument, "query index out of range");
  }
  Candidates best(k);
  if (k == 0 || nodes_.empty()) return std::move(best).take();
  const Point3 q = (*cloud_)[query];

  // Explicit stack of (node, lower bound on squared distance).
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.reserve(64);
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (bound > best.worst()) continue;
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        if (idx == query) continue;
        const double d2 = squared_norm(packed_[i] - q);
        if (d2 > best.worst()) continue;
        best.offer({idx, d2});
      }
      continue;
    }
    const double diff = coord(q, node.axis) - node.split;
    const auto near = diff < 0 ? node.left : node.right;
    const auto far = diff < 0 ? node.right : node.left;
    stack.emplace_back(far, std::max(bound, diff * diff));
    stack.emplace_back(near, bound);
  }
  return std::move(best).take();
}

}  // namespace pcnoise
