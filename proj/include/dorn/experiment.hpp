#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dorn/metrics.hpp"
#include "dorn/scene.hpp"
#include "dorn/training.hpp"
#include "dorn/windows.hpp"

namespace dorn {

/// Bad or unknown configuration keys and values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings for dataset generation, training and evaluation, read from a
/// `key = value` file. Lines starting with '#' are comments.
///
/// Keys:
///   alpha, beta, K                          discretization range and bins
///   base_lr, power, momentum, weight_decay,
///   total_iters, batch_size, seed           optimizer
///   lr.<variant>                            base_lr override for a variant
///   crop_width, crop_height, random_flip    training crops
///   n_images, width, height, depth_min, depth_max, num_shapes,
///   noise_sigma, sparsity, albedo_spread, contrast     synthetic scenes
///   test_fraction                           held-out share of the dataset
///   window_width, window_height,
///   stride_x, stride_y                      test-time windows (0 = default)
///   cap_min, cap_max                        evaluation depth cap
///   variants                                comma list of variant names
///   sweep_k                                 comma list of K values
///   sweep_band                              max delta1 spread for K in
///                                           [40, 120]
///   data_dir, out_dir                       relative to the config file
struct ExperimentConfig {
  double alpha = 0.0;
  double beta = 80.0;
  int num_bins = 80;

  TrainConfig train;
  SceneSpec scene;
  int n_images = 24;
  double test_fraction = 0.25;

  WindowSize window{0, 0};
  WindowSize stride{0, 0};
  DepthCap cap{1e-3, 80.0};

  std::vector<std::string> variants = all_variant_names();
  // Curvature differs a lot between objectives, so one base_lr cannot
  // suit them all.
  std::map<std::string, double> variant_lr = {
      {"MSE", 0.03},    {"MSE-SID", 0.03}, {"MCC-UD", 3.0},  {"MCC-SID", 3.0},
      {"DORN-UD", 1.0}, {"DORN-SID", 1.0}, {"berHu", 1e-3}};
  std::vector<int> sweep_k = {2, 40, 60, 80, 100, 120};
  double sweep_band = 0.03;

  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "out";

  /// Training settings for a variant, with its base_lr override applied.
  TrainConfig train_config(const std::string& variant) const;

  /// Window defaults to the training crop, stride to half the window.
  WindowSize effective_window() const;
  WindowSize effective_stride() const;

  void validate() const;
};

/// Applies one `key = value` assignment.
void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::string& value);
ExperimentConfig parse_config(std::istream& is,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Scene seed for image `index` of a dataset generated with `seed`.
std::uint64_t scene_seed(std::uint64_t seed, int index);

std::string sample_stem(int index);

struct ManifestEntry {
  std::string id;
  int width = 0;
  int height = 0;
  std::size_t valid_pixels = 0;
};

/// Writes n_images `NNNN_img.png` / `NNNN_depth.png` pairs and
/// `manifest.csv` into `dir`. Returns the manifest rows.
std::vector<ManifestEntry> generate_dataset(const ExperimentConfig& config,
                                            const std::filesystem::path& dir);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);

struct Dataset {
  std::vector<std::string> ids;
  std::vector<TrainingSample> samples;
};

Dataset load_dataset(const std::filesystem::path& dir);

struct Split {
  Dataset train;
  Dataset test;
};

/// The last round(test_fraction * n) samples (at least one) are held out.
Split split_dataset(Dataset all, double test_fraction);

struct VariantResult {
  std::string variant;
  int num_bins = 0;
  std::optional<MetricsReport> report;
  std::string error;
  TrainResult training;
};

/// Trains `variant` on `train` with K bins and scores windowed predictions
/// on `test` (mean of per-image reports). Divergence is captured in
/// `error` rather than thrown.
VariantResult run_variant(const ExperimentConfig& config,
                          const std::string& variant, int num_bins,
                          const Split& split);

struct OrderingCheck {
  std::string better;
  std::string worse;
  double better_delta1 = 0.0;
  double worse_delta1 = 0.0;
  bool held = false;
};

/// delta1 orderings DORN-SID >= DORN-UD, DORN-SID >= MCC-SID,
/// MCC-SID >= MCC-UD, DORN-SID >= MSE among the variants present. When
/// either side failed to train, the check holds only if the worse one did.
std::vector<OrderingCheck> ablation_orderings(
    const std::vector<VariantResult>& results);

void write_ablation_csv(std::ostream& os,
                        const std::vector<VariantResult>& results);

struct SweepTrend {
  std::optional<bool> coarse_worse;  // delta1(K=2) < delta1(K=80)
  std::optional<double> spread;      // max - min delta1 over K in [40, 120]
  bool spread_ok = true;
  bool held() const {
    return coarse_worse.value_or(true) && spread_ok;
  }
};

SweepTrend sweep_trend(const std::vector<VariantResult>& results,
                       double band);

/// `K,delta1,rmse` rows.
void write_sweep_csv(std::ostream& os,
                     const std::vector<VariantResult>& results);

struct EvalRow {
  std::string file;
  MetricsReport report;
};

/// Pairs depth files (`*_depth.png` or `*.pfm`) by name across the two
/// directories; any file without a partner is an error naming it.
std::vector<EvalRow> evaluate_directories(const std::filesystem::path& pred,
                                          const std::filesystem::path& gt,
                                          DepthCap cap);

DepthMap read_depth_file(const std::filesystem::path& path);

}  // namespace dorn
