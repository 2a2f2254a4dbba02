#include "pcnoise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcnoise/error.hpp"
#include "pcnoise/parallel.hpp"

namespace pcnoise {

void validate(const NoiseParams& p) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("noise parameter ") + name +
                      " must be finite and >= 0");
    }
  };
  check(p.a, "a");
  check(p.b, "b");
  check(p.c, "c");
  check(p.k, "k");
  check(p.p_out, "p_out");
  if (p.p_out > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "p_out must be <= 1");
  }
}

double AnnotatedCloud::mean_sigma() const {
  if (stats.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : stats) sum += s.sigma;
  return sum / static_cast<double>(stats.size());
}

double AnnotatedCloud::mean_mu() const {
  if (stats.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : stats) sum += s.mu;
  return sum / static_cast<double>(stats.size());
}

std::size_t AnnotatedCloud::outlier_count() const {
  return static_cast<std::size_t>(
      std::count(outlier.begin(), outlier.end(), true));
}

Point3 perturb_point(const Point3& p, const SensorPose& sensor, double sigma,
                     double mu, RandomStream& rng) {
  const Point3 ray = ray_direction(p, sensor);
  const double eps = mu + sigma * rng.gaussian();
  // Keeps signed zeros of the input intact for the noise-free model.
  if (eps == 0.0) return p;
  return p + eps * ray;
}

namespace {

double uniform_between(double lo, double hi, double u) {
  return std::min(hi, lo + u * (hi - lo));
}

}  // namespace

OutlierResult inject_outliers(const PointCloud& cloud, double p_out,
                              const BoundingBox& bbox, std::uint64_t seed) {
  if (!(p_out >= 0.0 && p_out <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p_out must lie in [0, 1]");
  }
  if (!(bbox.lo.x <= bbox.hi.x && bbox.lo.y <= bbox.hi.y &&
        bbox.lo.z <= bbox.hi.z)) {
    throw Error(ErrorCode::kInvalidArgument,
                "bounding box has negative extent");
  }
  OutlierResult out{cloud, std::vector<bool>(cloud.size(), false)};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    RandomStream rng(seed, DrawPurpose::kOutlier, i);
    if (!(rng.uniform() < p_out)) continue;
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    const double uz = rng.uniform();
    out.cloud[i] = {uniform_between(bbox.lo.x, bbox.hi.x, ux),
                    uniform_between(bbox.lo.y, bbox.hi.y, uy),
                    uniform_between(bbox.lo.z, bbox.hi.z, uz)};
    out.mask[i] = true;
  }
  return out;
}

AnnotatedCloud corrupt_cloud(const PointCloud& cloud, const SensorPose& sensor,
                             const NoiseParams& params, std::uint64_t seed,
                             const CorruptionOptions& options) {
  validate(params);
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "empty cloud");
  if (!is_finite(sensor.position)) {
    throw Error(ErrorCode::kInvalidArgument, "sensor position not finite");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_finite(cloud[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "point " + std::to_string(i) + " is not finite");
    }
  }

  const auto normals =
      estimate_normals(cloud, options.normal_k, sensor, options.threads);

  AnnotatedCloud result;
  result.clean = cloud;
  result.seed = seed;
  result.stats.resize(cloud.size());
  PointCloud perturbed(cloud.size());
  parallel_for(cloud.size(), options.threads, [&](std::size_t i) {
    const Point3& p = cloud[i];
    PointNoiseStats s;
    s.r = range_to_sensor(p, sensor);
    s.cos_theta = incidence_cosine(p, normals[i], sensor);
    s.sigma = point_sigma(s.r, s.cos_theta, params);
    s.mu = bias_mu(s.cos_theta, params.k);
    RandomStream rng(seed, DrawPurpose::kRangeNoise, i);
    perturbed[i] = perturb_point(p, sensor, s.sigma, s.mu, rng);
    result.stats[i] = s;
  });

  auto outliers =
      inject_outliers(perturbed, params.p_out, bounding_box(cloud), seed);
  result.corrupted = std::move(outliers.cloud);
  result.outlier = std::move(outliers.mask);
  return result;
}

}  // namespace pcnoise
