// Command-line front end: dataset generation, training, ablation, interval
// sweep, evaluation, threshold listing and encoder parameter counts.
//
// Exit codes: 0 success, 1 usage/config error, 2 trend assertion failed,
// 3 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dorn/depth_io.hpp"
#include "dorn/discretization.hpp"
#include "dorn/encoder_budget.hpp"
#include "dorn/experiment.hpp"
#include "dorn/io_error.hpp"
#include "dorn/metrics.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTrend = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::string out;
};

dorn::ExperimentConfig resolve_config(const CommonOptions& opts) {
  dorn::ExperimentConfig config;
  if (!opts.config_path.empty()) {
    config = dorn::load_config(opts.config_path);
  } else {
    config.validate();
  }
  if (opts.seed) {
    if (*opts.seed < 0) throw dorn::ConfigError("--seed must be >= 0");
    config.train.optimizer.seed = static_cast<std::uint64_t>(*opts.seed);
  }
  if (!opts.out.empty()) config.out_dir = opts.out;
  return config;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw dorn::IoError("cannot create output directory '" + dir.string() +
                        "'");
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw dorn::IoError("cannot write '" + path.string() + "'");
  return os;
}

dorn::Split load_split(const dorn::ExperimentConfig& config) {
  return dorn::split_dataset(dorn::load_dataset(config.data_dir),
                             config.test_fraction);
}

int cmd_gen_data(const CommonOptions& opts) {
  auto config = resolve_config(opts);
  // gen-data writes the dataset itself into --out when given.
  const fs::path dir = opts.out.empty() ? config.data_dir : fs::path(opts.out);
  const auto manifest = dorn::generate_dataset(config, dir);
  std::cout << "wrote " << manifest.size() << " samples to " << dir.string()
            << '\n';
  return kExitOk;
}

int cmd_train(const CommonOptions& opts, std::string variant_name) {
  const auto config = resolve_config(opts);
  if (variant_name.empty()) variant_name = config.variants.front();
  const dorn::Variant variant = dorn::parse_variant(variant_name);
  const auto split = load_split(config);
  const auto scheme = dorn::DiscretizationScheme::build(
      variant.strategy, config.alpha, config.beta, config.num_bins);

  const auto result =
      dorn::train(split.train.samples, scheme, variant,
                  config.train_config(variant.name));

  ensure_dir(config.out_dir);
  dorn::save_head(config.out_dir / (variant.name + ".ordh"), result.head);
  {
    auto os = open_output(config.out_dir / (variant.name + "_trace.csv"));
    os << "iter,loss\n" << std::setprecision(12);
    for (const auto& p : result.trace) os << p.iter << ',' << p.loss << '\n';
  }
  const fs::path pred_dir = config.out_dir / "pred";
  const fs::path gt_dir = config.out_dir / "gt";
  ensure_dir(pred_dir);
  ensure_dir(gt_dir);
  for (std::size_t i = 0; i < split.test.samples.size(); ++i) {
    const auto& sample = split.test.samples[i];
    const std::string name = split.test.ids[i] + "_depth.png";
    const auto pred = dorn::predict_windows(
        result.head, sample.image, scheme, config.effective_window(),
        config.effective_stride());
    dorn::write_depth_png16(pred, pred_dir / name);
    dorn::write_depth_png16(sample.depth, gt_dir / name);
  }
  std::cout << "trained " << variant.name << " for "
            << config.train.optimizer.total_iters << " iterations; head and "
            << split.test.samples.size() << " test predictions in "
            << config.out_dir.string() << '\n';
  return kExitOk;
}

int cmd_ablate(const CommonOptions& opts) {
  const auto config = resolve_config(opts);
  const auto split = load_split(config);
  std::vector<dorn::VariantResult> results;
  for (const auto& v : config.variants) {
    results.push_back(dorn::run_variant(config, v, config.num_bins, split));
    if (!results.back().error.empty()) {
      std::cerr << "warning: " << results.back().error << '\n';
    }
  }
  ensure_dir(config.out_dir);
  {
    auto os = open_output(config.out_dir / "ablation.csv");
    dorn::write_ablation_csv(os, results);
  }
  dorn::write_ablation_csv(std::cout, results);

  bool held = true;
  for (const auto& c : dorn::ablation_orderings(results)) {
    std::cerr << (c.held ? "ok   " : "FAIL ") << c.better << " >= " << c.worse
              << " on delta1 (" << c.better_delta1 << " vs " << c.worse_delta1
              << ")\n";
    held = held && c.held;
  }
  return held ? kExitOk : kExitTrend;
}

int cmd_sweep_k(const CommonOptions& opts, const std::vector<int>& ks) {
  auto config = resolve_config(opts);
  if (!ks.empty()) config.sweep_k = ks;
  const auto split = load_split(config);
  std::vector<dorn::VariantResult> results;
  for (int k : config.sweep_k) {
    results.push_back(dorn::run_variant(config, "DORN-SID", k, split));
  }
  ensure_dir(config.out_dir);
  {
    auto os = open_output(config.out_dir / "sweep_k.csv");
    dorn::write_sweep_csv(os, results);
  }
  dorn::write_sweep_csv(std::cout, results);
  const auto trend = dorn::sweep_trend(results, config.sweep_band);
  if (trend.coarse_worse) {
    std::cerr << (*trend.coarse_worse ? "ok   " : "FAIL ")
              << "delta1(K=2) < delta1(K=80)\n";
  }
  if (trend.spread) {
    std::cerr << (trend.spread_ok ? "ok   " : "FAIL ")
              << "delta1 spread over K in [40, 120] = " << *trend.spread
              << " (band " << config.sweep_band << ")\n";
  }
  return trend.held() ? kExitOk : kExitTrend;
}

int cmd_eval(const std::string& pred, const std::string& gt, double cap_min,
             double cap_max) {
  const auto rows = dorn::evaluate_directories(pred, gt, {cap_min, cap_max});
  std::vector<dorn::MetricsReport> reports;
  std::cout << "file," << dorn::csv_header() << '\n';
  for (const auto& r : rows) {
    std::cout << r.file << ',' << dorn::to_csv(r.report) << '\n';
    reports.push_back(r.report);
  }
  std::cout << "mean," << dorn::to_csv(dorn::average_reports(reports)) << '\n';
  return kExitOk;
}

int cmd_thresholds(const std::string& strategy, double alpha, double beta,
                   int k) {
  const auto scheme = dorn::DiscretizationScheme::build(
      dorn::parse_strategy(strategy), alpha, beta, k);
  std::cout << "# " << scheme.serialize() << " xi=" << scheme.shift() << '\n';
  std::cout << "i,t_i,t_i_minus_xi\n" << std::setprecision(12);
  const auto& t = scheme.thresholds();
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::cout << i << ',' << t[i] << ',' << t[i] - scheme.shift() << '\n';
  }
  return kExitOk;
}

int cmd_param_count(const dorn::EncoderConfig& c) {
  const auto fc = dorn::params_fc_fashion(c);
  const auto pooled = dorn::params_pooled_encoder(c);
  std::cout << "encoder,params\n"
            << "fc_fashion," << fc << '\n'
            << "pooled," << pooled << '\n'
            << "ratio," << std::setprecision(6)
            << static_cast<double>(fc) / static_cast<double>(pooled) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ordinal depth regression toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "Experiment config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "Override the config seed");
    cmd->add_option("--out", common.out, "Output directory");
  };

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  add_common(gen);

  std::string variant;
  auto* train = app.add_subcommand("train", "Train one variant");
  add_common(train);
  train->add_option("--variant", variant,
                    "MSE, MSE-SID, MCC-UD, MCC-SID, DORN-UD, DORN-SID, berHu");

  auto* ablate = app.add_subcommand("ablate", "Train and score all variants");
  add_common(ablate);

  std::vector<int> ks;
  auto* sweep = app.add_subcommand("sweep-k", "DORN-SID over several K");
  add_common(sweep);
  sweep->add_option("--k", ks, "K values (default: config sweep_k)")
      ->delimiter(',');

  std::string pred_dir, gt_dir;
  double cap_min = dorn::DepthCap{}.min;
  double cap_max = dorn::DepthCap{}.max;
  auto* eval = app.add_subcommand("eval", "Score predictions against truth");
  eval->add_option("--pred", pred_dir)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt_dir)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--cap-min", cap_min);
  eval->add_option("--cap-max", cap_max);

  std::string strategy = "SID";
  double alpha = 0.0, beta = 80.0;
  int k = 80;
  auto* thresholds = app.add_subcommand("thresholds", "Print t_0 .. t_K");
  thresholds->add_option("--strategy", strategy, "UD or SID");
  thresholds->add_option("--alpha", alpha);
  thresholds->add_option("--beta", beta);
  thresholds->add_option("-K,--bins", k);

  dorn::EncoderConfig enc;
  auto* params = app.add_subcommand("param-count",
                                    "Full-image encoder parameter counts");
  params->add_option("--C", enc.in_channels, "Input channels");
  params->add_option("--C-out", enc.out_channels, "Output channels");
  params->add_option("--m", enc.hidden, "fc hidden width");
  params->add_option("--k", enc.pool, "Pooling kernel/stride");
  params->add_option("--height", enc.height, "Feature map height h");
  params->add_option("--width", enc.width, "Feature map width w");
  params->add_option("--downsample", enc.downsample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(common);
    if (*train) return cmd_train(common, variant);
    if (*ablate) return cmd_ablate(common);
    if (*sweep) return cmd_sweep_k(common, ks);
    if (*eval) return cmd_eval(pred_dir, gt_dir, cap_min, cap_max);
    if (*thresholds) return cmd_thresholds(strategy, alpha, beta, k);
    if (*params) return cmd_param_count(enc);
  } catch (const dorn::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
