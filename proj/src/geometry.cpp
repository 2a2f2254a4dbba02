#include "pcnoise/geometry.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "pcnoise/error.hpp"
#include "pcnoise/kdtree.hpp"
#include "pcnoise/parallel.hpp"

namespace pcnoise {

BoundingBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "empty cloud");
  BoundingBox box{cloud.front(), cloud.front()};
  for (const auto& p : cloud) {
    box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y),
              std::min(box.lo.z, p.z)};
    box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y),
              std::max(box.hi.z, p.z)};
  }
  return box;
}

double range_to_sensor(const Point3& p, const SensorPose& sensor) {
  return norm(p - sensor.position);
}

Point3 ray_direction(const Point3& p, const SensorPose& sensor) {
  const Point3 d = p - sensor.position;
  const double len = norm(d);
  if (len == 0.0) {
    throw Error(ErrorCode::kDegenerateRay, "point coincides with the sensor");
  }
  return (1.0 / len) * d;
}

namespace {

UnitNormal toward_sensor(const Point3& p, const SensorPose& sensor) {
  const Point3 d = sensor.position - p;
  const double len = norm(d);
  if (len == 0.0) return {0.0, 0.0, 0.0, true};
  return {d.x / len, d.y / len, d.z / len, true};
}

UnitNormal normal_at(const PointCloud& cloud, const KdTree& tree,
                     std::size_t i, std::size_t k, const SensorPose& sensor) {
  const auto neighbors = tree.nearest_excluding(i, k);
  const Point3& p = cloud[i];

  Eigen::Vector3d centroid(p.x, p.y, p.z);
  for (const auto& nb : neighbors) {
    const auto& q = cloud[nb.index];
    centroid += Eigen::Vector3d(q.x, q.y, q.z);
  }
  const double count = static_cast<double>(neighbors.size() + 1);
  centroid /= count;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  auto accumulate = [&](const Point3& q) {
    const Eigen::Vector3d d = Eigen::Vector3d(q.x, q.y, q.z) - centroid;
    cov.noalias() += d * d.transpose();
  };
  accumulate(p);
  for (const auto& nb : neighbors) accumulate(cloud[nb.index]);
  cov /= count;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return toward_sensor(p, sensor);
  const Eigen::Vector3d& ev = solver.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) ||
      ev(1) - ev(0) <= kDegenerateEigenTolerance * ev(2)) {
    return toward_sensor(p, sensor);
  }

  Eigen::Vector3d n = solver.eigenvectors().col(0);
  n.normalize();
  const Point3 to_sensor = sensor.position - p;
  if (n.x() * to_sensor.x + n.y() * to_sensor.y + n.z() * to_sensor.z < 0.0) {
    n = -n;
  }
  return {n.x(), n.y(), n.z(), false};
}

}  // namespace

std::vector<UnitNormal> estimate_normals(const PointCloud& cloud, std::size_t k,
                                         const SensorPose& sensor,
                                         std::size_t threads) {
  if (k < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "normal estimation needs k >= 3, got " + std::to_string(k));
  }
  if (cloud.size() <= k) {
    throw Error(ErrorCode::kInsufficientPoints,
                "cloud has " + std::to_string(cloud.size()) +
                    " points, normal estimation with k=" + std::to_string(k) +
                    " needs at least " + std::to_string(k + 1));
  }
  const KdTree tree(cloud);
  std::vector<UnitNormal> normals(cloud.size());
  const auto& order = tree.leaf_order();
  parallel_for(cloud.size(), threads, [&](std::size_t j) {
    const std::size_t i = order[j];
    normals[i] = normal_at(cloud, tree, i, k, sensor);
  });
  return normals;
}

double incidence_cosine(const Point3& p, const UnitNormal& n,
                        const SensorPose& sensor) {
  const Point3 ray = ray_direction(p, sensor);
  return std::clamp(std::abs(dot(ray, n.vector())), 0.0, 1.0);
}

}  // namespace pcnoise
