#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcnoise/io.hpp"

namespace pcnoise {

inline constexpr std::size_t kDefaultCalibrationBins = 15;
inline constexpr double kProbabilitySumTolerance = 1e-6;
// Reliability curves below this confidence are thinly populated in practice.
inline constexpr double kLowConfidenceThreshold = 0.4;

struct PredictionRecord {
  std::string sample_id;
  std::uint32_t true_label = 0;
  std::vector<double> probs;

  // Lowest index among maximal probabilities.
  std::uint32_t predicted_label() const;
  double confidence() const;
  bool correct() const { return predicted_label() == true_label; }
};

// Throws InvalidArgument unless C >= 2, entries are finite and nonnegative,
// they sum to 1 within kProbabilitySumTolerance and true_label < C.
void validate(const PredictionRecord& rec);

struct CalibrationBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mean_conf = 0.0;
  double mean_acc = 0.0;
};

// Bin index for a confidence in [0, 1]: bin 0 is [0, 1/M], bin i > 0 is
// (i/M, (i+1)/M].
std::size_t confidence_bin(double confidence, std::size_t bins);

double accuracy(std::span<const PredictionRecord> preds);
std::vector<CalibrationBin> reliability_curve(
    std::span<const PredictionRecord> preds, std::size_t bins);
// Sum over bins of (n_i / N) |acc_i - conf_i|.
double ece_from_curve(std::span<const CalibrationBin> curve);
double ece(std::span<const PredictionRecord> preds, std::size_t bins);

inline double predicted_uncertainty(const PredictionRecord& rec) {
  return 1.0 - rec.confidence();
}

// Two-pass centered sample correlation. Throws InvalidArgument on size
// mismatch or fewer than two values, ZeroVariance when either side is
// constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

using SigmaTable = std::map<std::string, double, std::less<>>;

// Throws InvalidArgument on duplicate sample ids.
SigmaTable make_sigma_table(const std::vector<SigmaRow>& rows);

// Mean sigma of each prediction's sample, in prediction order. Throws
// MissingSigmaError listing every unmatched id.
std::vector<double> join_sigma(std::span<const PredictionRecord> preds,
                               const SigmaTable& table);

double uncertainty_correlation(std::span<const PredictionRecord> preds,
                               const SigmaTable& table);

struct QuantileGroups {
  // Per group: smallest and largest member value.
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> sizes;
  // Group of each input value, in input order.
  std::vector<std::size_t> assignment;
  // True when equal values straddle a group boundary.
  bool degenerate = false;
};

// Equal-count split into `groups` contiguous ranks of the values sorted
// ascending. The first n % groups groups get one extra member. Equal values
// keep their input order unless `tie_keys` orders them. Throws TooFewValues
// when values.size() < groups.
QuantileGroups quantile_groups(std::span<const double> values,
                               std::size_t groups);
QuantileGroups quantile_groups(std::span<const double> values,
                               std::span<const std::string> tie_keys,
                               std::size_t groups);

struct TierPredictions {
  std::string name;
  std::vector<PredictionRecord> preds;
  SigmaTable sigma;
};

struct StratumResult {
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  std::size_t count = 0;
  double ece = 0.0;
};

struct StratifiedEce {
  std::vector<std::string> pooled_tiers;
  std::vector<StratumResult> strata;
  bool degenerate = false;
};

// Pools (sample, sigma) over all tiers, splits by sigma into equal-count
// groups (ties ordered by sample id, then tier order) and computes ECE per
// group. Group 0 holds the lowest sigma.
StratifiedEce stratified_ece(std::span<const TierPredictions> tiers,
                             std::size_t groups, std::size_t bins);

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double ece = 0.0;
  std::vector<CalibrationBin> curve;
  std::optional<double> pearson_r;
  // Reason pearson_r is absent: "zero_variance" or "too_few_samples".
  std::string pearson_undefined_reason;
  double low_conf_fraction = 0.0;
  std::optional<StratifiedEce> stratified;
};

EvalReport evaluate(std::span<const PredictionRecord> preds,
                    const SigmaTable& sigma, std::size_t bins,
                    std::span<const TierPredictions> tiers = {},
                    std::size_t groups = 4);

// Predictions CSV: "sample_id,true_label,p_0,...,p_{C-1}".
std::vector<PredictionRecord> parse_predictions(std::string_view contents,
                                                const std::string& source);
std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path);

std::string format_report(const EvalReport& report);
inline constexpr std::string_view kCurveHeader =
    "bin_lo,bin_hi,count,mean_conf,mean_acc";
std::string format_curve(std::span<const CalibrationBin> curve);
std::vector<CalibrationBin> parse_curve(std::string_view contents,
                                        const std::string& source);
inline constexpr std::string_view kStratifiedHeader =
    "quartile,sigma_lo,sigma_hi,count,ece";
std::string format_stratified(const StratifiedEce& result);

}  // namespace pcnoise
