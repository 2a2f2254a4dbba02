#include "pcnoise/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>

#include "pcnoise/error.hpp"
#include "pcnoise/format.hpp"
#include "pcnoise/parallel.hpp"
#include "pcnoise/random.hpp"

namespace pcnoise {

const std::vector<std::string>& tier_names() {
  static const std::vector<std::string> names{"none", "light", "moderate",
                                              "heavy"};
  return names;
}

NoiseParams tier_params(std::string_view name) {
  if (name == "none") return {};
  if (name == "light") return {0.003, 0.001, 1.5, 0.005, 0.01};
  if (name == "moderate") return {0.005, 0.002, 2.0, 0.010, 0.02};
  if (name == "heavy") return {0.010, 0.003, 3.0, 0.015, 0.05};
  std::string msg = "unknown tier '" + std::string(name) + "'; valid tiers:";
  for (const auto& n : tier_names()) msg += " " + n;
  throw Error(ErrorCode::kUnknownTier, msg);
}

TierConfig preset_tier(std::string_view name) {
  TierConfig tier;
  tier.params = tier_params(name);
  tier.name = std::string(name);
  return tier;
}

TierConfig parse_tier_config(std::string_view contents,
                             const std::string& source, TierConfig base) {
  const auto lines = split_lines(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source, i + 1, "expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "normal_k" || key == "global_seed") {
      std::uint64_t v = 0;
      if (!parse_uint64(value, v)) {
        throw ParseError(source, i + 1,
                         "invalid integer for " + std::string(key));
      }
      if (key == "normal_k") {
        base.normal_k = static_cast<std::size_t>(v);
      } else {
        base.global_seed = v;
      }
      continue;
    }

    double v = 0.0;
    if (!parse_double(value, v) || !std::isfinite(v)) {
      throw ParseError(source, i + 1, "invalid number for " + std::string(key));
    }
    if (key == "a") {
      base.params.a = v;
    } else if (key == "b") {
      base.params.b = v;
    } else if (key == "c") {
      base.params.c = v;
    } else if (key == "k") {
      base.params.k = v;
    } else if (key == "p_out") {
      base.params.p_out = v;
    } else if (key == "sensor_x") {
      base.sensor.position.x = v;
    } else if (key == "sensor_y") {
      base.sensor.position.y = v;
    } else if (key == "sensor_z") {
      base.sensor.position.z = v;
    } else {
      throw ParseError(source, i + 1, "unknown key '" + std::string(key) + "'");
    }
  }
  try {
    validate(base.params);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidArgument, source + ": " + e.what());
  }
  return base;
}

TierConfig read_tier_config(const std::filesystem::path& path,
                            TierConfig base) {
  return parse_tier_config(read_file(path), path.string(), std::move(base));
}

std::string format_params(const NoiseParams& p) {
  std::string out;
  out += "a=" + format_double(p.a) + "\n";
  out += "b=" + format_double(p.b) + "\n";
  out += "c=" + format_double(p.c) + "\n";
  out += "k=" + format_double(p.k) + "\n";
  out += "p_out=" + format_double(p.p_out) + "\n";
  return out;
}

std::uint64_t sample_seed(std::uint64_t global_seed,
                          std::string_view sample_id) {
  return mix64(global_seed ^ mix64(fnv1a64(sample_id)));
}

GenerationSummary generate_benchmark(const Manifest& manifest,
                                     const TierConfig& tier,
                                     const std::filesystem::path& out_dir,
                                     const GenerationOptions& options) {
  if (tier.name.empty() || tier.name.find('/') != std::string::npos ||
      tier.name == "." || tier.name == "..") {
    throw Error(ErrorCode::kInvalidArgument,
                "tier name '" + tier.name + "' is not a valid directory name");
  }
  if (!std::isfinite(options.scale) || options.scale <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be finite and > 0");
  }
  validate(tier.params);

  GenerationSummary summary;
  summary.tier_dir = out_dir / tier.name;
  summary.requested = manifest.entries.size();
  std::filesystem::create_directories(summary.tier_dir);

  const auto n = manifest.entries.size();
  std::vector<std::optional<SigmaRow>> rows(n);
  std::vector<std::size_t> point_counts(n, 0);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<bool> stop{false};

  parallel_for(n, options.threads, [&](std::size_t i) {
    if (stop.load()) return;
    const auto& entry = manifest.entries[i];
    try {
      PointCloud cloud = read_cloud(manifest.resolve(entry));
      if (options.scale != 1.0) {
        for (auto& p : cloud) p = options.scale * p;
      }
      const auto annotated =
          corrupt_cloud(cloud, tier.sensor, tier.params,
                        sample_seed(tier.global_seed, entry.sample_id),
                        {tier.normal_k, 1});
      write_file_atomic(summary.tier_dir / (entry.sample_id + ".xyzn"),
                        format_annotated(annotated));
      rows[i] = SigmaRow{entry.sample_id, entry.label, annotated.mean_sigma(),
                         annotated.mean_mu(), annotated.outlier_count()};
      point_counts[i] = annotated.size();
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (!options.keep_going) stop.store(true);
    }
  });

  std::vector<SigmaRow> written;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      summary.failures.push_back({manifest.entries[i].sample_id, *errors[i]});
    }
    if (rows[i]) {
      written.push_back(std::move(*rows[i]));
      summary.total_points += point_counts[i];
    }
  }
  std::sort(written.begin(), written.end(),
            [](const SigmaRow& a, const SigmaRow& b) {
              return a.sample_id < b.sample_id;
            });
  summary.written = written.size();
  double sigma_sum = 0.0;
  for (const auto& r : written) sigma_sum += r.mean_sigma;
  if (!written.empty()) {
    summary.mean_sigma = sigma_sum / static_cast<double>(written.size());
  }

  if (summary.ok() || options.keep_going) {
    write_file_atomic(summary.tier_dir / "summary.csv",
                      format_summary(written));
    summary.summary_written = true;
  }
  return summary;
}

}  // namespace pcnoise
