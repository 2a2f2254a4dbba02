#include "pcnoise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcnoise/error.hpp"
#include "pcnoise/format.hpp"

namespace pcnoise {

std::uint32_t PredictionRecord::predicted_label() const {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

double PredictionRecord::confidence() const {
  return probs.empty() ? 0.0 : probs[predicted_label()];
}

void validate(const PredictionRecord& rec) {
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument,
                "prediction '" + rec.sample_id + "': " + why);
  };
  if (rec.probs.size() < 2) fail("needs at least 2 class probabilities");
  double sum = 0.0;
  for (double p : rec.probs) {
    if (!std::isfinite(p) || p < 0.0) fail("probabilities must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    fail("probabilities sum to " + format_double(sum) + ", not 1");
  }
  if (rec.true_label >= rec.probs.size()) fail("true_label out of range");
}

namespace {

void require_nonempty(std::span<const PredictionRecord> preds) {
  if (preds.empty()) throw Error(ErrorCode::kEmptyInput, "no predictions");
}

void require_bins(std::size_t bins) {
  if (bins == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  }
}

double bin_edge(std::size_t i, std::size_t bins) {
  return static_cast<double>(i) / static_cast<double>(bins);
}

}  // namespace

std::size_t confidence_bin(double confidence, std::size_t bins) {
  require_bins(bins);
  if (!(confidence <= bin_edge(1, bins))) {
    const double scaled = std::ceil(confidence * static_cast<double>(bins));
    std::size_t i = scaled <= 1.0 ? 0 : static_cast<std::size_t>(scaled) - 1;
    i = std::min(i, bins - 1);
    // Align with the exact (lo, hi] edges used in the curve output.
    while (i > 0 && confidence <= bin_edge(i, bins)) --i;
    while (i + 1 < bins && confidence > bin_edge(i + 1, bins)) ++i;
    return i;
  }
  return 0;
}

double accuracy(std::span<const PredictionRecord> preds) {
  require_nonempty(preds);
  std::size_t correct = 0;
  for (const auto& r : preds) correct += r.correct() ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::vector<CalibrationBin> reliability_curve(
    std::span<const PredictionRecord> preds, std::size_t bins) {
  require_nonempty(preds);
  require_bins(bins);
  std::vector<CalibrationBin> curve(bins);
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> correct(bins, 0);
  for (std::size_t i = 0; i < bins; ++i) {
    curve[i].lo = bin_edge(i, bins);
    curve[i].hi = bin_edge(i + 1, bins);
  }
  for (const auto& r : preds) {
    validate(r);
    const double conf = r.confidence();
    const auto b = confidence_bin(conf, bins);
    ++curve[b].count;
    conf_sum[b] += conf;
    correct[b] += r.correct() ? 1 : 0;
  }
  for (std::size_t i = 0; i < bins; ++i) {
    if (curve[i].count == 0) continue;
    const auto n = static_cast<double>(curve[i].count);
    curve[i].mean_conf = conf_sum[i] / n;
    curve[i].mean_acc = static_cast<double>(correct[i]) / n;
  }
  return curve;
}

double ece_from_curve(std::span<const CalibrationBin> curve) {
  std::size_t total = 0;
  for (const auto& b : curve) total += b.count;
  if (total == 0) throw Error(ErrorCode::kEmptyInput, "curve has no samples");
  const auto n = static_cast<double>(total);
  double sum = 0.0;
  for (const auto& b : curve) {
    if (b.count == 0) continue;
    sum += static_cast<double>(b.count) / n * std::abs(b.mean_acc - b.mean_conf);
  }
  return sum;
}

double ece(std::span<const PredictionRecord> preds, std::size_t bins) {
  return ece_from_curve(reliability_curve(preds, bins));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pearson: size mismatch");
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pearson: needs >= 2 values");
  }
  // Constancy is checked on the raw values; a rounded mean can leave tiny
  // nonzero residuals for a constant vector.
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(xs) || constant(ys)) {
    throw Error(ErrorCode::kZeroVariance,
                "correlation undefined: constant input");
  }
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kZeroVariance,
                "correlation undefined: constant input");
  }
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

SigmaTable make_sigma_table(const std::vector<SigmaRow>& rows) {
  SigmaTable table;
  for (const auto& r : rows) {
    if (!table.emplace(r.sample_id, r.mean_sigma).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate sample_id '" + r.sample_id + "' in sigma table");
    }
  }
  return table;
}

std::vector<double> join_sigma(std::span<const PredictionRecord> preds,
                               const SigmaTable& table) {
  std::vector<double> sigma;
  std::vector<std::string> missing;
  sigma.reserve(preds.size());
  for (const auto& r : preds) {
    auto it = table.find(r.sample_id);
    if (it == table.end()) {
      missing.push_back(r.sample_id);
    } else {
      sigma.push_back(it->second);
    }
  }
  if (!missing.empty()) throw MissingSigmaError(std::move(missing));
  return sigma;
}

double uncertainty_correlation(std::span<const PredictionRecord> preds,
                               const SigmaTable& table) {
  const auto sigma = join_sigma(preds, table);
  std::vector<double> uncertainty;
  uncertainty.reserve(preds.size());
  for (const auto& r : preds) uncertainty.push_back(predicted_uncertainty(r));
  return pearson(sigma, uncertainty);
}

namespace {

QuantileGroups split_sorted(std::span<const double> values,
                            const std::vector<std::size_t>& order,
                            std::size_t groups) {
  const std::size_t n = values.size();
  QuantileGroups out;
  out.assignment.assign(n, 0);
  const std::size_t base = n / groups;
  const std::size_t extra = n % groups;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    out.sizes.push_back(size);
    out.lo.push_back(values[order[pos]]);
    out.hi.push_back(values[order[pos + size - 1]]);
    for (std::size_t j = pos; j < pos + size; ++j) out.assignment[order[j]] = g;
    pos += size;
  }
  for (std::size_t g = 0; g + 1 < groups; ++g) {
    if (out.hi[g] == out.lo[g + 1]) out.degenerate = true;
  }
  return out;
}

void check_group_input(std::span<const double> values, std::size_t groups) {
  if (groups == 0) {
    throw Error(ErrorCode::kInvalidArgument, "group count must be >= 1");
  }
  if (values.size() < groups) {
    throw Error(ErrorCode::kTooFewValues,
                std::to_string(values.size()) + " values cannot fill " +
                    std::to_string(groups) + " groups");
  }
  for (double v : values) {
    if (std::isnan(v)) {
      throw Error(ErrorCode::kInvalidArgument, "NaN in grouped values");
    }
  }
}

}  // namespace

QuantileGroups quantile_groups(std::span<const double> values,
                               std::size_t groups) {
  check_group_input(values, groups);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  return split_sorted(values, order, groups);
}

QuantileGroups quantile_groups(std::span<const double> values,
                               std::span<const std::string> tie_keys,
                               std::size_t groups) {
  check_group_input(values, groups);
  if (tie_keys.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "tie key count mismatch");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return tie_keys[a] < tie_keys[b];
  });
  return split_sorted(values, order, groups);
}

StratifiedEce stratified_ece(std::span<const TierPredictions> tiers,
                             std::size_t groups, std::size_t bins) {
  if (tiers.empty()) {
    throw Error(ErrorCode::kEmptyInput, "stratification needs >= 1 tier");
  }
  StratifiedEce result;
  std::vector<const PredictionRecord*> pooled;
  std::vector<double> sigma;
  std::vector<std::string> keys;
  for (const auto& tier : tiers) {
    result.pooled_tiers.push_back(tier.name);
    std::vector<double> joined;
    try {
      joined = join_sigma(tier.preds, tier.sigma);
    } catch (const MissingSigmaError& e) {
      std::vector<std::string> ids;
      for (const auto& id : e.ids()) ids.push_back(tier.name + ":" + id);
      throw MissingSigmaError(std::move(ids));
    }
    for (std::size_t i = 0; i < tier.preds.size(); ++i) {
      pooled.push_back(&tier.preds[i]);
      sigma.push_back(joined[i]);
      keys.push_back(tier.preds[i].sample_id);
    }
  }

  const auto split = quantile_groups(sigma, keys, groups);
  result.degenerate = split.degenerate;
  std::vector<std::vector<PredictionRecord>> members(groups);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    members[split.assignment[i]].push_back(*pooled[i]);
  }
  for (std::size_t g = 0; g < groups; ++g) {
    result.strata.push_back(
        {split.lo[g], split.hi[g], split.sizes[g], ece(members[g], bins)});
  }
  return result;
}

EvalReport evaluate(std::span<const PredictionRecord> preds,
                    const SigmaTable& sigma, std::size_t bins,
                    std::span<const TierPredictions> tiers,
                    std::size_t groups) {
  EvalReport report;
  report.n = preds.size();
  report.accuracy = accuracy(preds);
  report.curve = reliability_curve(preds, bins);
  report.ece = ece_from_curve(report.curve);

  std::size_t low = 0;
  for (const auto& r : preds) low += r.confidence() < kLowConfidenceThreshold;
  report.low_conf_fraction =
      static_cast<double>(low) / static_cast<double>(preds.size());

  const auto joined = join_sigma(preds, sigma);
  if (preds.size() < 2) {
    report.pearson_undefined_reason = "too_few_samples";
  } else {
    std::vector<double> uncertainty;
    for (const auto& r : preds) uncertainty.push_back(predicted_uncertainty(r));
    try {
      report.pearson_r = pearson(joined, uncertainty);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroVariance) throw;
      report.pearson_undefined_reason = "zero_variance";
    }
  }

  if (!tiers.empty()) report.stratified = stratified_ece(tiers, groups, bins);
  return report;
}

std::vector<PredictionRecord> parse_predictions(std::string_view contents,
                                                const std::string& source) {
  const auto lines = split_lines(contents);
  if (lines.empty()) throw ParseError(source, 1, "missing header");
  const auto header = split(lines[0], ',');
  if (header.size() < 4 || header[0] != "sample_id" ||
      header[1] != "true_label") {
    throw ParseError(source, 1,
                     "expected header sample_id,true_label,p_0,...,p_{C-1} "
                     "with C >= 2");
  }
  const std::size_t classes = header.size() - 2;
  for (std::size_t c = 0; c < classes; ++c) {
    if (header[c + 2] != "p_" + std::to_string(c)) {
      throw ParseError(source, 1,
                       "expected column p_" + std::to_string(c) + ", got '" +
                           std::string(header[c + 2]) + "'");
    }
  }

  std::vector<PredictionRecord> preds;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != classes + 2) {
      throw ParseError(source, i + 1,
                       "expected " + std::to_string(classes + 2) + " fields");
    }
    if (f[0].empty()) throw ParseError(source, i + 1, "empty sample_id");
    PredictionRecord rec;
    rec.sample_id = std::string(f[0]);
    std::uint64_t label = 0;
    if (!parse_uint64(f[1], label) || label >= classes) {
      throw ParseError(source, i + 1,
                       "invalid true_label '" + std::string(f[1]) + "'");
    }
    rec.true_label = static_cast<std::uint32_t>(label);
    for (std::size_t c = 0; c < classes; ++c) {
      double p = 0.0;
      if (!parse_double(f[c + 2], p)) {
        throw ParseError(source, i + 1,
                         "invalid probability '" + std::string(f[c + 2]) + "'");
      }
      rec.probs.push_back(p);
    }
    try {
      validate(rec);
    } catch (const Error& e) {
      throw ParseError(source, i + 1, e.what());
    }
    preds.push_back(std::move(rec));
  }
  if (preds.empty()) {
    throw Error(ErrorCode::kEmptyInput, source + ": no prediction rows");
  }
  return preds;
}

std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.string());
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "accuracy=" + format_double(report.accuracy) + "\n";
  out += "ece=" + format_double(report.ece) + "\n";
  if (report.pearson_r) {
    out += "pearson_r=" + format_double(*report.pearson_r) + "\n";
  } else {
    out += "pearson_r=undefined(" + report.pearson_undefined_reason + ")\n";
  }
  out += "n=" + std::to_string(report.n) + "\n";
  out += "bins=" + std::to_string(report.curve.size()) + "\n";
  out += "low_conf_fraction=" + format_double(report.low_conf_fraction) + "\n";
  return out;
}

std::string format_curve(std::span<const CalibrationBin> curve) {
  std::string out(kCurveHeader);
  out += '\n';
  for (const auto& b : curve) {
    out += format_double(b.lo) + "," + format_double(b.hi) + "," +
           std::to_string(b.count) + "," + format_double(b.mean_conf) + "," +
           format_double(b.mean_acc) + "\n";
  }
  return out;
}

std::vector<CalibrationBin> parse_curve(std::string_view contents,
                                        const std::string& source) {
  const auto lines = split_lines(contents);
  if (lines.empty() || lines[0] != kCurveHeader) {
    throw ParseError(source, 1, "expected header " + std::string(kCurveHeader));
  }
  std::vector<CalibrationBin> curve;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    CalibrationBin b;
    std::uint64_t count = 0;
    if (f.size() != 5 || !parse_double(f[0], b.lo) ||
        !parse_double(f[1], b.hi) || !parse_uint64(f[2], count) ||
        !parse_double(f[3], b.mean_conf) || !parse_double(f[4], b.mean_acc)) {
      throw ParseError(source, i + 1, "malformed curve row");
    }
    b.count = static_cast<std::size_t>(count);
    curve.push_back(b);
  }
  return curve;
}

std::string format_stratified(const StratifiedEce& result) {
  std::string out(kStratifiedHeader);
  out += '\n';
  for (std::size_t g = 0; g < result.strata.size(); ++g) {
    const auto& s = result.strata[g];
    out += std::to_string(g) + "," + format_double(s.sigma_lo) + "," +
           format_double(s.sigma_hi) + "," + std::to_string(s.count) + "," +
           format_double(s.ece) + "\n";
  }
  return out;
}

}  // namespace pcnoise
