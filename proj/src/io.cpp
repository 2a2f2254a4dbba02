#include "pcnoise/io.hpp"

#include <cmath>
#include <set>

#include "pcnoise/error.hpp"
#include "pcnoise/format.hpp"

namespace pcnoise {

namespace {

bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

double parse_finite(std::string_view field, const std::string& source,
                    std::size_t line_no, const char* what) {
  double v = 0.0;
  if (!parse_double(field, v) || !std::isfinite(v)) {
    throw ParseError(source, line_no,
                     std::string("invalid ") + what + " '" +
                         std::string(field) + "'");
  }
  return v;
}

std::uint32_t parse_label(std::string_view field, const std::string& source,
                          std::size_t line_no) {
  std::uint64_t v = 0;
  if (!parse_uint64(field, v) || v > 0xFFFFFFFFULL) {
    throw ParseError(source, line_no,
                     "invalid label '" + std::string(field) + "'");
  }
  return static_cast<std::uint32_t>(v);
}

void expect_header(const std::vector<std::string_view>& lines,
                   std::string_view header, const std::string& source) {
  if (lines.empty() || lines.front() != header) {
    throw ParseError(source, 1,
                     "expected header '" + std::string(header) + "'");
  }
}

void check_sample_id(std::string_view id, const std::string& source,
                     std::size_t line_no) {
  if (id.empty() || id == "." || id == "..") {
    throw ParseError(source, line_no, "invalid sample_id");
  }
  for (unsigned char c : id) {
    if (c == '/' || c == '\\' || c < 0x20) {
      throw ParseError(source, line_no,
                       "sample_id '" + std::string(id) +
                           "' must be usable as a file name");
    }
  }
}

}  // namespace

PointCloud parse_cloud(std::string_view contents, const std::string& source) {
  PointCloud cloud;
  const auto lines = split_lines(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skippable(lines[i])) continue;
    const auto fields = split(lines[i], ' ');
    if (fields.size() != 3) {
      throw ParseError(source, i + 1,
                       "expected 3 space-separated coordinates, got " +
                           std::to_string(fields.size()));
    }
    cloud.push_back({parse_finite(fields[0], source, i + 1, "coordinate"),
                     parse_finite(fields[1], source, i + 1, "coordinate"),
                     parse_finite(fields[2], source, i + 1, "coordinate")});
  }
  if (cloud.empty()) {
    throw Error(ErrorCode::kEmptyCloud, source + ": cloud has no points");
  }
  return cloud;
}

PointCloud read_cloud(const std::filesystem::path& path) {
  return parse_cloud(read_file(path), path.string());
}

std::string format_cloud(const PointCloud& cloud) {
  std::string out;
  for (const auto& p : cloud) {
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += ' ';
    out += format_double(p.z);
    out += '\n';
  }
  return out;
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  write_file_atomic(path, format_cloud(cloud));
}

std::string format_annotated(const AnnotatedCloud& cloud) {
  std::string out(kAnnotatedHeader);
  out += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.corrupted[i];
    const auto& s = cloud.stats[i];
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += ' ';
    out += format_double(p.z);
    out += ' ';
    out += format_double(s.sigma);
    out += ' ';
    out += format_double(s.mu);
    out += cloud.outlier[i] ? " 1\n" : " 0\n";
  }
  return out;
}

AnnotatedRows parse_annotated(std::string_view contents,
                              const std::string& source) {
  const auto lines = split_lines(contents);
  expect_header(lines, kAnnotatedHeader, source);
  AnnotatedRows rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (skippable(lines[i])) continue;
    const auto f = split(lines[i], ' ');
    if (f.size() != 6) {
      throw ParseError(source, i + 1, "expected 6 fields");
    }
    rows.points.push_back({parse_finite(f[0], source, i + 1, "coordinate"),
                           parse_finite(f[1], source, i + 1, "coordinate"),
                           parse_finite(f[2], source, i + 1, "coordinate")});
    rows.sigma.push_back(parse_finite(f[3], source, i + 1, "sigma"));
    rows.mu.push_back(parse_finite(f[4], source, i + 1, "mu"));
    if (f[5] != "0" && f[5] != "1") {
      throw ParseError(source, i + 1, "outlier flag must be 0 or 1");
    }
    rows.outlier.push_back(f[5] == "1");
  }
  return rows;
}

AnnotatedRows read_annotated(const std::filesystem::path& path) {
  return parse_annotated(read_file(path), path.string());
}

Manifest parse_manifest(std::string_view contents, const std::string& source) {
  const auto lines = split_lines(contents);
  expect_header(lines, "sample_id,label,path", source);
  Manifest manifest;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 3) {
      throw ParseError(source, i + 1, "expected sample_id,label,path");
    }
    check_sample_id(f[0], source, i + 1);
    if (!seen.emplace(f[0]).second) {
      throw ParseError(source, i + 1,
                       "duplicate sample_id '" + std::string(f[0]) + "'");
    }
    if (f[2].empty()) throw ParseError(source, i + 1, "empty path");
    SampleEntry e{std::string(f[0]), parse_label(f[1], source, i + 1),
                  std::filesystem::path(std::string(f[2]))};
    manifest.class_count = std::max(manifest.class_count, e.label + 1);
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.empty()) {
    throw Error(ErrorCode::kEmptyInput, source + ": manifest has no entries");
  }
  return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
  auto m = parse_manifest(read_file(path), path.string());
  m.base_dir = path.parent_path();
  return m;
}

std::string format_summary(const std::vector<SigmaRow>& rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.sample_id;
    out += ',';
    out += std::to_string(r.label);
    out += ',';
    out += format_double(r.mean_sigma);
    out += ',';
    out += format_double(r.mean_mu);
    out += ',';
    out += std::to_string(r.outlier_count);
    out += '\n';
  }
  return out;
}

std::vector<SigmaRow> parse_summary(std::string_view contents,
                                    const std::string& source) {
  const auto lines = split_lines(contents);
  expect_header(lines, kSummaryHeader, source);
  std::vector<SigmaRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 5) throw ParseError(source, i + 1, "expected 5 fields");
    if (f[0].empty()) throw ParseError(source, i + 1, "empty sample_id");
    SigmaRow r;
    r.sample_id = std::string(f[0]);
    r.label = parse_label(f[1], source, i + 1);
    r.mean_sigma = parse_finite(f[2], source, i + 1, "mean_sigma");
    r.mean_mu = parse_finite(f[3], source, i + 1, "mean_mu");
    std::uint64_t count = 0;
    if (!parse_uint64(f[4], count)) {
      throw ParseError(source, i + 1, "invalid outlier_count");
    }
    r.outlier_count = static_cast<std::size_t>(count);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SigmaRow> read_summary(const std::filesystem::path& path) {
  return parse_summary(read_file(path), path.string());
}

}  // namespace pcnoise
