#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcnoise/geometry.hpp"
#include "pcnoise/io.hpp"
#include "pcnoise/noise.hpp"

namespace pcnoise {

inline constexpr Point3 kDefaultSensorPosition{0.0, -2.0, 0.0};

// Names accepted by tier_params, in severity order.
const std::vector<std::string>& tier_names();

// Preset noise parameters for none/light/moderate/heavy. Throws UnknownTier.
NoiseParams tier_params(std::string_view name);

struct TierConfig {
  std::string name = "none";
  NoiseParams params;
  SensorPose sensor{kDefaultSensorPosition};
  std::size_t normal_k = kDefaultNormalNeighbors;
  std::uint64_t global_seed = 0;
};

TierConfig preset_tier(std::string_view name);

// Flat "key=value" file with keys a, b, c, k, p_out, sensor_x, sensor_y,
// sensor_z, normal_k, global_seed. Missing keys keep the values in `base`;
// unknown keys are a ParseError.
TierConfig parse_tier_config(std::string_view contents,
                             const std::string& source, TierConfig base);
TierConfig read_tier_config(const std::filesystem::path& path,
                            TierConfig base);

// Key-value block for a tier, one key per line; parseable by
// parse_tier_config.
std::string format_params(const NoiseParams& params);

// mix64(global_seed ^ mix64(fnv1a64(sample_id))).
std::uint64_t sample_seed(std::uint64_t global_seed, std::string_view sample_id);

struct GenerationOptions {
  double scale = 1.0;
  std::size_t threads = 0;
  bool keep_going = false;
};

struct SampleFailure {
  std::string sample_id;
  std::string message;
};

struct GenerationSummary {
  std::filesystem::path tier_dir;
  std::size_t requested = 0;
  std::size_t written = 0;
  std::size_t total_points = 0;
  // Mean over written samples of their mean sigma.
  double mean_sigma = 0.0;
  std::vector<SampleFailure> failures;
  bool summary_written = false;

  bool ok() const { return failures.empty(); }
};

// Corrupts every manifest entry into out_dir/<tier.name>/<sample_id>.xyzn and
// writes out_dir/<tier.name>/summary.csv sorted by sample_id. Without
// keep_going the summary is withheld when any sample fails.
GenerationSummary generate_benchmark(const Manifest& manifest,
                                     const TierConfig& tier,
                                     const std::filesystem::path& out_dir,
                                     const GenerationOptions& options = {});

}  // namespace pcnoise
