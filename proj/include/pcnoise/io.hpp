#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcnoise/noise.hpp"
#include "pcnoise/point.hpp"

namespace pcnoise {

// Clean cloud text: one "x y z" per line, single spaces, '#' lines ignored.
PointCloud parse_cloud(std::string_view contents, const std::string& source);
PointCloud read_cloud(const std::filesystem::path& path);
std::string format_cloud(const PointCloud& cloud);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

inline constexpr std::string_view kAnnotatedHeader = "# x y z sigma mu outlier";

// Annotated cloud text (.xyzn): header, then "x y z sigma mu outlier" rows of
// the corrupted coordinates and their step-2 statistics.
std::string format_annotated(const AnnotatedCloud& cloud);

struct AnnotatedRows {
  PointCloud points;
  std::vector<double> sigma;
  std::vector<double> mu;
  std::vector<bool> outlier;
};

AnnotatedRows parse_annotated(std::string_view contents,
                              const std::string& source);
AnnotatedRows read_annotated(const std::filesystem::path& path);

struct SampleEntry {
  std::string sample_id;
  std::uint32_t label = 0;
  // As written in the manifest; relative paths resolve against the
  // manifest's directory.
  std::filesystem::path path;
};

struct Manifest {
  std::vector<SampleEntry> entries;
  std::uint32_t class_count = 0;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const SampleEntry& e) const {
    return e.path.is_absolute() ? e.path : base_dir / e.path;
  }
};

// CSV with header "sample_id,label,path". class_count is max(label) + 1.
Manifest parse_manifest(std::string_view contents, const std::string& source);
Manifest read_manifest(const std::filesystem::path& path);

struct SigmaRow {
  std::string sample_id;
  std::uint32_t label = 0;
  double mean_sigma = 0.0;
  double mean_mu = 0.0;
  std::size_t outlier_count = 0;
};

inline constexpr std::string_view kSummaryHeader =
    "sample_id,label,mean_sigma,mean_mu,outlier_count";

// Rows are emitted in the given order.
std::string format_summary(const std::vector<SigmaRow>& rows);
std::vector<SigmaRow> parse_summary(std::string_view contents,
                                    const std::string& source);
std::vector<SigmaRow> read_summary(const std::filesystem::path& path);

}  // namespace pcnoise
