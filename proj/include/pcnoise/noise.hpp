#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcnoise/geometry.hpp"
#include "pcnoise/point.hpp"
#include "pcnoise/random.hpp"

namespace pcnoise {

// Sensor noise model parameters. All lengths in meters.
struct NoiseParams {
  double a = 0.0;      // base standard deviation
  double b = 0.0;      // standard deviation growth per meter of range
  double c = 0.0;      // incidence-angle sensitivity (unitless)
  double k = 0.0;      // bias scale
  double p_out = 0.0;  // per-point outlier probability

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

// Throws InvalidArgument unless every field is finite and within its range.
void validate(const NoiseParams& params);

struct PointNoiseStats {
  double sigma = 0.0;
  double mu = 0.0;
  double r = 0.0;
  double cos_theta = 1.0;

  friend bool operator==(const PointNoiseStats&,
                         const PointNoiseStats&) = default;
};

struct AnnotatedCloud {
  PointCloud clean;
  PointCloud corrupted;
  std::vector<PointNoiseStats> stats;
  std::vector<bool> outlier;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return clean.size(); }
  // Sample-level measurement uncertainty.
  double mean_sigma() const;
  double mean_mu() const;
  std::size_t outlier_count() const;

  friend bool operator==(const AnnotatedCloud&,
                         const AnnotatedCloud&) = default;
};

inline double sigma_range(double r, double a, double b) { return a + b * r; }

inline double angle_factor(double cos_theta, double c) {
  return 1.0 + c * (1.0 - cos_theta);
}

inline double bias_mu(double cos_theta, double k) {
  return k * (1.0 - cos_theta);
}

// Range term scaled by the angle factor.
inline double point_sigma(double r, double cos_theta, const NoiseParams& p) {
  return sigma_range(r, p.a, p.b) * angle_factor(cos_theta, p.c);
}

// Moves p along the sensor ray by one draw of N(mu, sigma). Consumes exactly
// one Gaussian variate. Throws DegenerateRay when p is at the sensor.
Point3 perturb_point(const Point3& p, const SensorPose& sensor, double sigma,
                     double mu, RandomStream& rng);

struct OutlierResult {
  PointCloud cloud;
  std::vector<bool> mask;
};

// Replaces each point independently with probability p_out by a uniform draw
// inside bbox. Point i uses the stream (seed, kOutlier, i): one uniform for
// the decision and, if replaced, three more for x, y, z.
OutlierResult inject_outliers(const PointCloud& cloud, double p_out,
                              const BoundingBox& bbox, std::uint64_t seed);

struct CorruptionOptions {
  std::size_t normal_k = kDefaultNormalNeighbors;
  std::size_t threads = 1;
};

// Full corruption of one sample: normals on the clean cloud, per-point
// sigma/mu, along-ray Gaussian perturbation, then outlier replacement inside
// the clean cloud's bounding box. Deterministic in (cloud, sensor, params,
// normal_k, seed) and independent of the thread count.
AnnotatedCloud corrupt_cloud(const PointCloud& cloud, const SensorPose& sensor,
                             const NoiseParams& params, std::uint64_t seed,
                             const CorruptionOptions& options = {});

}  // namespace pcnoise
