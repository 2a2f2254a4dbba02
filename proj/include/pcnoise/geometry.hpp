#pragma once

#include <cstddef>
#include <vector>

#include "pcnoise/point.hpp"

namespace pcnoise {

inline constexpr std::size_t kDefaultNormalNeighbors = 16;

// Relative tolerance below which the two smallest neighborhood variances are
// treated as equal and the normal is considered undetermined.
inline constexpr double kDegenerateEigenTolerance = 1e-9;

struct UnitNormal {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 0.0;
  // Set when the neighborhood did not determine a plane; the normal is then
  // the unit vector from the point toward the sensor.
  bool degenerate = false;

  Point3 vector() const { return {nx, ny, nz}; }
};

// Euclidean distance from p to the sensor.
double range_to_sensor(const Point3& p, const SensorPose& sensor);

// Unit vector from the sensor toward p. Throws DegenerateRay when p coincides
// with the sensor.
Point3 ray_direction(const Point3& p, const SensorPose& sensor);

// Per-point normals from PCA of the point and its k nearest neighbors
// (Euclidean, ties to lower index), oriented toward the sensor.
//
// Throws InsufficientPoints when cloud.size() <= k, InvalidArgument when
// k < 3. `threads` == 0 uses all available workers; the result does not
// depend on it.
std::vector<UnitNormal> estimate_normals(const PointCloud& cloud, std::size_t k,
                                         const SensorPose& sensor,
                                         std::size_t threads = 1);

// |cos| of the angle between the sensor ray and the normal, clamped to [0, 1].
double incidence_cosine(const Point3& p, const UnitNormal& n,
                        const SensorPose& sensor);

}  // namespace pcnoise
