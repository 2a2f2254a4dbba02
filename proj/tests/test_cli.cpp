#include <doctest.h>

#include <sstream>

#include "pcnoise/cli.hpp"
#include "pcnoise/format.hpp"
#include "pcnoise/io.hpp"
#include "pcnoise/metrics.hpp"
#include "pcnoise/pipeline.hpp"
#include "test_support.hpp"

using namespace pcnoise;
using pcnoise::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcnoise");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path make_dataset(const fs::path& dir, std::size_t count) {
  std::string manifest = "sample_id,label,path\n";
  for (std::size_t i = 0; i < count; ++i) {
    const auto id = "m" + std::to_string(i);
    write_cloud(dir / (id + ".xyz"), pcnoise::testing::sphere_cloud(200, i));
    manifest += id + "," + std::to_string(i % 3) + "," + id + ".xyz\n";
  }
  write_file_atomic(dir / "manifest.csv", manifest);
  return dir / "manifest.csv";
}

// Predictions with confidence tied to sigma plus a sigma summary.
void write_eval_inputs(const fs::path& dir, const std::string& tag, double sigma0,
                       std::size_t n) {
  std::string preds = "sample_id,true_label,p_0,p_1,p_2\n";
  std::vector<SigmaRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = tag + std::to_string(i);
    const double s = sigma0 + 0.0005 * i;
    const double conf = 0.95 - 10 * s;
    const double rest = (1.0 - conf) / 2;
    preds += id + "," + std::to_string(i % 2) + "," + format_double(conf) + "," +
             format_double(rest) + "," + format_double(rest) + "\n";
    rows.push_back({id, 0, s, 0.0, 0});
  }
  write_file_atomic(dir / (tag + "_preds.csv"), preds);
  write_file_atomic(dir / (tag + "_sigma.csv"), format_summary(rows));
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (auto line : split_lines(text)) {
    const auto eq = line.find('=');
    if (eq != std::string_view::npos) {
      kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
    }
  }
  return kv;
}

}  // namespace

TEST_CASE("params") {
  auto r = run({"params", "moderate"});
  CHECK(r.code == kExitOk);
  const auto kv = parse_kv(r.out);
  CHECK(kv.at("a") == "0.005");
  CHECK(kv.at("b") == "0.002");
  CHECK(std::stod(kv.at("c")) == 2.0);
  CHECK(std::stod(kv.at("k")) == 0.010);
  CHECK(kv.at("p_out") == "0.02");

  r = run({"params", "none"});
  for (const auto& [key, value] : parse_kv(r.out)) CHECK(value == "0");

  r = run({"params", "foo"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("light") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"params", "light", "--bogus"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"evaluate", "a.csv"}).code == kExitUsage);
  CHECK(run({"evaluate", "a.csv", "b.csv", "--bins", "0"}).code == kExitUsage);
}

TEST_CASE("corrupt subcommand") {
  TempDir dir("cli_corrupt");
  const auto manifest = make_dataset(dir.path(), 4).string();
  const auto out1 = (dir.path() / "o1").string();
  const auto out2 = (dir.path() / "o2").string();

  auto r = run({"corrupt", manifest, "light", out1, "--seed", "42"});
  CHECK(r.code == kExitOk);
  CHECK(parse_kv(r.out).at("written") == "4");
  r = run({"corrupt", manifest, "light", out2, "--seed", "42", "--threads", "3"});
  CHECK(r.code == kExitOk);
  CHECK(pcnoise::testing::snapshot_tree(out1) == pcnoise::testing::snapshot_tree(out2));

  r = run({"corrupt", manifest, "none", out1});
  CHECK(r.code == kExitOk);
  CHECK(parse_kv(r.out).at("mean_sigma") == "0");
  for (const auto& row : read_summary(fs::path(out1) / "none" / "summary.csv")) {
    CHECK(row.mean_sigma == 0.0);
    const auto ann = read_annotated(fs::path(out1) / "none" / (row.sample_id + ".xyzn"));
    CHECK(ann.points == read_cloud(dir.path() / (row.sample_id + ".xyz")));
  }

  r = run({"corrupt", manifest, "severe", out1});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("none light moderate heavy") != std::string::npos);

  write_file_atomic(dir.path() / "mytier.cfg", "a=0.001\nb=0\nc=0\nk=0\np_out=0\nglobal_seed=5\n");
  const auto cfg = (dir.path() / "mytier.cfg").string();
  CHECK(run({"corrupt", manifest, "light", out1, "--config", cfg}).code == kExitUsage);
  r = run({"corrupt", manifest, out1, "--config", cfg, "--sensor", "0,-3,0"});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(fs::path(out1) / "mytier" / "summary.csv"));
  CHECK(std::stod(parse_kv(r.out).at("mean_sigma")) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(run({"corrupt", manifest, out1}).code == kExitUsage);
  CHECK(run({"corrupt", manifest, "light", out1, "--sensor", "1,2"}).code == kExitUsage);

  // Data failures exit 1.
  write_file_atomic(dir.path() / "bad.csv", "sample_id,label,path\nx,0,missing.xyz\n");
  r = run({"corrupt", (dir.path() / "bad.csv").string(), "light", out1});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("x") != std::string::npos);
  r = run({"corrupt", (dir.path() / "bad.csv").string(), "light", out1, "--keep-going"});
  CHECK(r.code == kExitFailure);
}

TEST_CASE("evaluate subcommand") {
  TempDir dir("cli_eval");
  write_eval_inputs(dir.path(), "t", 0.001, 30);
  const auto preds = (dir.path() / "t_preds.csv").string();
  const auto sigma = (dir.path() / "t_sigma.csv").string();
  const auto out = (dir.path() / "report").string();

  auto r = run({"evaluate", preds, sigma, "--out", out});
  CHECK(r.code == kExitOk);
  const auto kv = parse_kv(read_file(fs::path(out) / "report.txt"));
  for (const char* key : {"accuracy", "ece", "pearson_r", "n", "bins"}) {
    CHECK(kv.count(key) == 1);
  }
  CHECK(kv.at("n") == "30");
  CHECK(kv.at("bins") == "15");
  CHECK(std::stod(kv.at("pearson_r")) == doctest::Approx(1.0).epsilon(1e-9));
  const auto curve = parse_curve(read_file(fs::path(out) / "curve.csv"), "curve");
  CHECK(curve.size() == 15);
  CHECK(std::abs(ece_from_curve(curve) - std::stod(kv.at("ece"))) <= 1e-12);

  // Single bin collapses to |accuracy - mean confidence|.
  r = run({"evaluate", preds, sigma, "--bins", "1", "--out", out});
  CHECK(r.code == kExitOk);
  const auto one = parse_kv(r.out);
  const auto records = read_predictions(preds);
  double conf = 0.0;
  for (const auto& p : records) conf += p.confidence();
  conf /= records.size();
  CHECK(std::abs(std::stod(one.at("ece")) - std::abs(accuracy(records) - conf)) <= 1e-12);

  // Missing sigma row.
  auto rows = read_summary(sigma);
  rows.erase(rows.begin() + 4);
  write_file_atomic(dir.path() / "short.csv", format_summary(rows));
  r = run({"evaluate", preds, (dir.path() / "short.csv").string(), "--out", out});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("t4") != std::string::npos);

  write_file_atomic(dir.path() / "badp.csv", "sample_id,true_label,p_0,p_1\nt0,0,0.9,0.9\n");
  r = run({"evaluate", (dir.path() / "badp.csv").string(), sigma, "--out", out});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("stratify subcommand") {
  TempDir dir("cli_strat");
  const std::vector<std::string> tiers{"none", "light", "moderate", "heavy"};
  std::vector<std::string> args{"stratify"};
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    write_eval_inputs(dir.path(), tiers[i], 0.002 * i, 10);
  }
  for (const auto& t : tiers) {
    args.insert(args.end(), {"--preds", (dir.path() / (t + "_preds.csv")).string(),
                             "--sigmas", (dir.path() / (t + "_sigma.csv")).string()});
  }
  const auto out = (dir.path() / "strat").string();
  args.insert(args.end(), {"--out", out});
  auto r = run(args);
  CHECK(r.code == kExitOk);
  const auto table = read_file(fs::path(out) / "stratified.csv");
  const auto lines = split_lines(table);
  REQUIRE(lines.size() >= 5);
  CHECK(lines[0] == kStratifiedHeader);
  double prev = -1.0;
  for (std::size_t i = 1; i <= 4; ++i) {
    const auto f = split(lines[i], ',');
    CHECK(f[0] == std::to_string(i - 1));
    const double lo = std::stod(std::string(f[1]));
    CHECK(lo >= prev);
    prev = lo;
    CHECK(f[3] == "10");
  }
  const auto meta = parse_kv(read_file(fs::path(out) / "stratify_report.txt"));
  CHECK(meta.at("pooled_tiers") == "none_preds,light_preds,moderate_preds,heavy_preds");

  // Constant sigma is flagged.
  std::vector<SigmaRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"none" + std::to_string(i), 0, 0.0, 0.0, 0});
  write_file_atomic(dir.path() / "flat.csv", format_summary(rows));
  r = run({"stratify", "--preds", (dir.path() / "none_preds.csv").string(), "--sigmas",
           (dir.path() / "flat.csv").string(), "--names", "none", "--out", out});
  CHECK(r.code == kExitOk);
  const auto flat = parse_kv(read_file(fs::path(out) / "stratify_report.txt"));
  CHECK(flat.at("degenerate_boundaries") == "true");
  CHECK(flat.at("pooled_tiers") == "none");
  CHECK(r.err.find("warning") != std::string::npos);

  CHECK(run({"stratify", "--preds", "a.csv", "--out", out}).code == kExitUsage);
  CHECK(run({"stratify", "--preds", "a", "--preds", "b", "--sigmas", "c", "--out", out}).code ==
        kExitUsage);
}
