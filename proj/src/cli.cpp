#include "pcnoise/cli.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcnoise/error.hpp"
#include "pcnoise/format.hpp"
#include "pcnoise/metrics.hpp"
#include "pcnoise/pipeline.hpp"

namespace fs = std::filesystem;

namespace pcnoise {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptArgs {
  std::vector<std::string> positionals;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t normal_k = kDefaultNormalNeighbors;
  std::string sensor;
  double scale = 1.0;
  bool keep_going = false;
  std::size_t threads = 0;
};

struct EvaluateArgs {
  std::string predictions;
  std::string sigma;
  std::size_t bins = kDefaultCalibrationBins;
  std::string out = ".";
};

struct StratifyArgs {
  std::vector<std::string> preds;
  std::vector<std::string> sigmas;
  std::vector<std::string> names;
  std::size_t quartiles = 4;
  std::size_t bins = kDefaultCalibrationBins;
  std::string out = ".";
};

Point3 parse_sensor(const std::string& text) {
  const auto f = split(text, ',');
  Point3 p;
  if (f.size() != 3 || !parse_double(trim(f[0]), p.x) ||
      !parse_double(trim(f[1]), p.y) || !parse_double(trim(f[2]), p.z) ||
      !is_finite(p)) {
    throw UsageError("--sensor expects x,y,z, got '" + text + "'");
  }
  return p;
}

int run_corrupt(const CLI::App& cmd, const CorruptArgs& args,
                std::ostream& out, std::ostream& err) {
  const bool use_config = !args.config.empty();
  std::string manifest_path, out_dir;
  TierConfig tier;
  if (args.positionals.size() == 3) {
    if (use_config) {
      throw UsageError("give either a tier name or --config, not both");
    }
    manifest_path = args.positionals[0];
    out_dir = args.positionals[2];
    try {
      tier = preset_tier(args.positionals[1]);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  } else if (args.positionals.size() == 2) {
    if (!use_config) {
      throw UsageError("missing tier name (or --config FILE)");
    }
    manifest_path = args.positionals[0];
    out_dir = args.positionals[1];
    tier = read_tier_config(args.config, TierConfig{});
    tier.name = fs::path(args.config).stem().string();
  } else {
    throw UsageError("usage: corrupt MANIFEST TIER OUT_DIR");
  }

  if (!use_config || cmd.count("--seed")) tier.global_seed = args.seed;
  if (!use_config || cmd.count("--normal-k")) tier.normal_k = args.normal_k;
  if (cmd.count("--sensor")) tier.sensor.position = parse_sensor(args.sensor);

  GenerationOptions options;
  options.scale = args.scale;
  options.threads = args.threads;
  options.keep_going = args.keep_going;

  const auto manifest = read_manifest(manifest_path);
  const auto summary = generate_benchmark(manifest, tier, out_dir, options);

  out << "tier=" << tier.name << "\n"
      << "out=" << summary.tier_dir.string() << "\n"
      << "samples=" << summary.requested << "\n"
      << "written=" << summary.written << "\n"
      << "failed=" << summary.failures.size() << "\n"
      << "points=" << summary.total_points << "\n"
      << "mean_sigma=" << format_double(summary.mean_sigma) << "\n";
  for (const auto& f : summary.failures) {
    err << "sample " << f.sample_id << " failed: " << f.message << "\n";
  }
  if (!summary.summary_written) {
    err << "summary.csv not written; rerun with --keep-going to keep "
           "successful samples\n";
  }
  return summary.ok() ? kExitOk : kExitFailure;
}

int run_evaluate(const EvaluateArgs& args, std::ostream& out) {
  const auto preds = read_predictions(args.predictions);
  const auto sigma = make_sigma_table(read_summary(args.sigma));
  const auto report = evaluate(preds, sigma, args.bins);

  const fs::path dir(args.out);
  fs::create_directories(dir);
  const auto text = format_report(report);
  write_file_atomic(dir / "report.txt", text);
  write_file_atomic(dir / "curve.csv", format_curve(report.curve));
  out << text;
  return kExitOk;
}

int run_stratify(const StratifyArgs& args, std::ostream& out,
                 std::ostream& err) {
  if (args.preds.empty() || args.preds.size() != args.sigmas.size()) {
    throw UsageError("--preds and --sigmas must be given the same number of "
                     "times (at least once)");
  }
  if (!args.names.empty() && args.names.size() != args.preds.size()) {
    throw UsageError("--names must match the number of --preds");
  }
  std::vector<TierPredictions> tiers;
  for (std::size_t i = 0; i < args.preds.size(); ++i) {
    TierPredictions t;
    t.name = args.names.empty() ? fs::path(args.preds[i]).stem().string()
                                : args.names[i];
    t.preds = read_predictions(args.preds[i]);
    t.sigma = make_sigma_table(read_summary(args.sigmas[i]));
    tiers.push_back(std::move(t));
  }
  const auto result = stratified_ece(tiers, args.quartiles, args.bins);

  std::string meta = "pooled_tiers=";
  for (std::size_t i = 0; i < result.pooled_tiers.size(); ++i) {
    if (i) meta += ',';
    meta += result.pooled_tiers[i];
  }
  meta += "\nquartiles=" + std::to_string(args.quartiles);
  meta += "\nbins=" + std::to_string(args.bins);
  meta += std::string("\ndegenerate_boundaries=") +
          (result.degenerate ? "true" : "false") + "\n";

  const fs::path dir(args.out);
  fs::create_directories(dir);
  const auto table = format_stratified(result);
  write_file_atomic(dir / "stratified.csv", table);
  write_file_atomic(dir / "stratify_report.txt", meta);
  out << table << meta;
  if (result.degenerate) {
    err << "warning: equal sigma values straddle quartile boundaries\n";
  }
  return kExitOk;
}

int run_params(const std::string& name, std::ostream& out) {
  NoiseParams params;
  try {
    params = tier_params(name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  out << format_params(params);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"LiDAR-style point cloud corruption and calibration evaluation",
               "pcnoise"};
  app.require_subcommand(1);

  CorruptArgs corrupt;
  auto* corrupt_cmd = app.add_subcommand(
      "corrupt", "Corrupt every cloud in a manifest with one noise tier");
  corrupt_cmd->add_option("args", corrupt.positionals,
                          "MANIFEST TIER OUT_DIR, or MANIFEST OUT_DIR with "
                          "--config")
      ->required()
      ->expected(2, 3);
  corrupt_cmd->add_option("--config", corrupt.config,
                          "Tier config file instead of a preset name");
  corrupt_cmd->add_option("--seed", corrupt.seed, "Global seed");
  corrupt_cmd->add_option("--normal-k", corrupt.normal_k,
                          "Neighbors used for normal estimation")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20));
  corrupt_cmd->add_option("--sensor", corrupt.sensor, "Sensor position x,y,z");
  corrupt_cmd->add_option("--scale", corrupt.scale,
                          "Uniform scale applied to clouds before corruption")
      ->check(CLI::PositiveNumber);
  corrupt_cmd->add_flag("--keep-going", corrupt.keep_going,
                        "Continue past failing samples");
  corrupt_cmd->add_option("--threads", corrupt.threads,
                          "Worker cap (0 = all available)");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Accuracy, ECE, reliability curve and sigma correlation");
  evaluate_cmd->add_option("predictions", evaluate_args.predictions)
      ->required();
  evaluate_cmd->add_option("sigma_summary", evaluate_args.sigma)->required();
  evaluate_cmd->add_option("--bins", evaluate_args.bins, "ECE bin count")
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--out", evaluate_args.out, "Report directory");

  StratifyArgs stratify;
  auto* stratify_cmd = app.add_subcommand(
      "stratify", "ECE per equal-count quantile of pooled sample sigma");
  stratify_cmd->add_option("--preds", stratify.preds,
                           "Predictions CSV (repeat once per tier)")
      ->required();
  stratify_cmd->add_option("--sigmas", stratify.sigmas,
                           "Sigma summary CSV (same order as --preds)")
      ->required();
  stratify_cmd->add_option("--names", stratify.names, "Tier names");
  stratify_cmd->add_option("--quartiles", stratify.quartiles,
                           "Number of sigma groups")
      ->check(CLI::PositiveNumber);
  stratify_cmd->add_option("--bins", stratify.bins, "ECE bin count")
      ->check(CLI::PositiveNumber);
  stratify_cmd->add_option("--out", stratify.out, "Output directory");

  std::string params_tier;
  auto* params_cmd =
      app.add_subcommand("params", "Print the noise parameters of a tier");
  params_cmd->add_option("tier", params_tier)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*corrupt_cmd) return run_corrupt(*corrupt_cmd, corrupt, out, err);
    if (*evaluate_cmd) return run_evaluate(evaluate_args, out);
    if (*stratify_cmd) return run_stratify(stratify, out, err);
    if (*params_cmd) return run_params(params_tier, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pcnoise
