#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dorn/discretization.hpp"
#include "dorn/features.hpp"
#include "dorn/heads.hpp"

namespace dorn {

/// SGD with momentum, L2 weight decay and polynomial learning-rate decay.
struct OptimizerConfig {
  double base_lr = 1e-4;
  double power = 0.9;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int total_iters = 1000;
  int batch_size = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// base_lr * (1 - iter / total_iters)^power, for 0 <= iter <= total_iters.
double lr_at(const OptimizerConfig& config, int iter);

/// v <- momentum v + (grad + weight_decay * W); W <- W - lr_at(iter) v.
/// The last column (bias) is exempt from weight decay.
void sgd_step(LinearHead& head, const Eigen::MatrixXd& grad,
              const OptimizerConfig& config, int iter,
              Eigen::MatrixXd& velocity);

/// Training objective attached to a head.
enum class Objective { kOrdinal, kMultiClass, kMseLog, kBerhu };

/// A named ablation variant: objective, discretization and whether
/// regression targets are snapped to bin midpoints first.
struct Variant {
  std::string name;
  Objective objective = Objective::kOrdinal;
  Strategy strategy = Strategy::kSpacingIncreasing;
  bool quantize_targets = false;

  HeadKind head_kind() const;
};

/// MSE, MSE-SID, MCC-UD, MCC-SID, DORN-UD, DORN-SID, berHu.
Variant parse_variant(std::string_view name);
const std::vector<std::string>& all_variant_names();

struct TrainingSample {
  Image image;
  DepthMap depth;
};

/// Per-channel affine standardization z = (x - mean) / scale, fitted on the
/// training images. Training runs on z; the learned weights are folded back
/// so the returned head consumes raw features. The last (bias) channel is
/// left untouched.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static FeatureScaler identity(int dim);
  static FeatureScaler fit(const std::vector<TrainingSample>& dataset);

  void apply(Volume& features) const;
  /// Weights acting on z converted to weights acting on raw x.
  Eigen::MatrixXd fold(const Eigen::MatrixXd& weights) const;
};

struct TrainConfig {
  OptimizerConfig optimizer;
  int crop_width = 32;
  int crop_height = 32;
  bool random_flip = true;
  bool standardize = true;
};

struct TracePoint {
  int iter = 0;
  double loss = 0.0;
};

struct TrainResult {
  LinearHead head;
  std::vector<TracePoint> trace;
};

/// Thrown when the training loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loss of a head on one stacked batch and its gradient over the weights.
struct HeadLoss {
  double value = 0.0;
  Eigen::MatrixXd grad;
};

/// Builds the per-objective targets from ground truth and evaluates the
/// objective and its weight gradient. Invalid pixels are ignored.
HeadLoss head_loss(const LinearHead& head, Objective objective,
                   bool quantize_targets, const Volume& features,
                   const DepthMap& gt, const DiscretizationScheme& scheme);

/// Trains a zero-initialized head by SGD on random crops (with replacement,
/// optionally flipped), in standardized feature coordinates unless
/// config.standardize is off. Deterministic for a given seed. The loss is
/// recorded every 10 iterations. total_iters == 0 returns the initial head.
TrainResult train(const std::vector<TrainingSample>& dataset,
                  const DiscretizationScheme& scheme, const Variant& variant,
                  const TrainConfig& config);

inline constexpr int kTraceInterval = 10;

}  // namespace dorn
