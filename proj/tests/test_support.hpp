#pragma once

// Shared fixtures and independent reference implementations for tests. The
// oracles here deliberately avoid the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <unistd.h>
#include <vector>

#include "pcnoise/format.hpp"
#include "pcnoise/metrics.hpp"
#include "pcnoise/point.hpp"

namespace pcnoise::testing {

inline PointCloud sphere_cloud(std::size_t n, std::uint64_t seed,
                               double radius = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointCloud cloud;
  cloud.reserve(n);
  while (cloud.size() < n) {
    Point3 p{normal(gen), normal(gen), normal(gen)};
    const double len = norm(p);
    if (len < 1e-12) continue;
    cloud.push_back((radius / len) * p);
  }
  return cloud;
}

inline PointCloud random_box_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud cloud(n);
  for (auto& p : cloud) p = {u(gen), u(gen), u(gen)};
  return cloud;
}

inline double angle_deg(const Point3& a, const Point3& b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// O(n) scan, ordering by (squared distance, index).
inline std::vector<std::size_t> brute_force_knn(const PointCloud& cloud,
                                                std::size_t query,
                                                std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i == query) continue;
    const Point3 d = cloud[i] - cloud[query];
    all.emplace_back(d.x * d.x + d.y * d.y + d.z * d.z, i);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < k && j < all.size(); ++j) {
    out.push_back(all[j].second);
  }
  return out;
}

// ECE straight from the definition: for each bin, scan all records and test
// interval membership explicitly.
inline double ece_oracle(const std::vector<PredictionRecord>& preds,
                         std::size_t bins) {
  const double n = static_cast<double>(preds.size());
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / static_cast<double>(bins);
    const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    double conf = 0.0, acc = 0.0, count = 0.0;
    for (const auto& r : preds) {
      double best = r.probs[0];
      std::size_t arg = 0;
      for (std::size_t c = 1; c < r.probs.size(); ++c) {
        if (r.probs[c] > best) {
          best = r.probs[c];
          arg = c;
        }
      }
      const bool in_bin = b == 0 ? (best >= 0.0 && best <= hi)
                                 : (best > lo && best <= hi);
      if (!in_bin) continue;
      count += 1.0;
      conf += best;
      acc += arg == r.true_label ? 1.0 : 0.0;
    }
    if (count > 0) total += count / n * std::abs(acc / count - conf / count);
  }
  return total;
}

// Sort (value, key, position) triples and cut into groups of sizes
// ceil/floor(n/q), larger groups first.
inline std::vector<std::size_t> quartile_oracle(
    const std::vector<double>& values, const std::vector<std::string>& keys,
    std::size_t q) {
  std::vector<std::tuple<double, std::string, std::size_t>> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows.emplace_back(values[i], keys[i], i);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::size_t> group(values.size());
  const std::size_t n = values.size();
  std::size_t rank = 0;
  for (std::size_t g = 0; g < q; ++g) {
    const std::size_t size = n / q + (g < n % q ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j) {
      group[std::get<2>(rows[rank++])] = g;
    }
  }
  return group;
}

// Random valid prediction with C classes.
inline PredictionRecord random_prediction(std::mt19937_64& gen,
                                          std::size_t classes,
                                          const std::string& id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PredictionRecord rec;
  rec.sample_id = id;
  double sum = 0.0;
  rec.probs.resize(classes);
  for (auto& p : rec.probs) {
    p = std::pow(u(gen), 3.0) + 1e-3;
    sum += p;
  }
  for (auto& p : rec.probs) p /= sum;
  rec.true_label = static_cast<std::uint32_t>(gen() % classes);
  return rec;
}

// Two-class record with the given confidence, correct or not.
inline PredictionRecord binary_prediction(const std::string& id, double conf,
                                          bool correct) {
  PredictionRecord rec;
  rec.sample_id = id;
  rec.probs = {conf, 1.0 - conf};
  rec.true_label = correct ? 0 : 1;
  return rec;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pcnoise_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Map of relative path -> contents for every regular file under root.
inline std::map<std::string, std::string> snapshot_tree(
    const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    files[std::filesystem::relative(e.path(), root).string()] =
        read_file(e.path());
  }
  return files;
}

}  // namespace pcnoise::testing
