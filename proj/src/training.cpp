#include "dorn/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dorn/losses.hpp"
#include "dorn/ordinal.hpp"

namespace dorn {

void OptimizerConfig::validate() const {
  // A zero rate is allowed so a run can be frozen for inspection.
  if (!(base_lr >= 0.0) || !std::isfinite(base_lr)) {
    throw std::invalid_argument("optimizer: base_lr must be >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("optimizer: momentum must be in [0, 1)");
  }
  if (!(power > 0.0)) throw std::invalid_argument("optimizer: power must be > 0");
  if (!(weight_decay >= 0.0)) {
    throw std::invalid_argument("optimizer: weight_decay must be >= 0");
  }
  if (total_iters < 1) {
    throw std::invalid_argument("optimizer: total_iters must be >= 1");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("optimizer: batch_size must be >= 1");
  }
}

double lr_at(const OptimizerConfig& config, int iter) {
  if (iter < 0 || iter > config.total_iters) {
    throw std::invalid_argument("lr_at: iteration outside [0, total_iters]");
  }
  const double progress = static_cast<double>(iter) / config.total_iters;
  return config.base_lr * std::pow(1.0 - progress, config.power);
}

void sgd_step(LinearHead& head, const Eigen::MatrixXd& grad,
              const OptimizerConfig& config, int iter,
              Eigen::MatrixXd& velocity) {
  auto& w = head.weights();
  if (grad.rows() != w.rows() || grad.cols() != w.cols()) {
    throw std::invalid_argument("sgd_step: gradient shape mismatch");
  }
  if (velocity.size() == 0) velocity = Eigen::MatrixXd::Zero(w.rows(), w.cols());
  if (velocity.rows() != w.rows() || velocity.cols() != w.cols()) {
    throw std::invalid_argument("sgd_step: velocity shape mismatch");
  }
  const Eigen::Index bias = w.cols() - 1;
  Eigen::MatrixXd step = grad;
  step.leftCols(bias) += config.weight_decay * w.leftCols(bias);
  velocity = config.momentum * velocity + step;
  w -= lr_at(config, iter) * velocity;
}

HeadKind Variant::head_kind() const {
  switch (objective) {
    case Objective::kOrdinal:
      return HeadKind::kOrdinal;
    case Objective::kMultiClass:
      return HeadKind::kMultiClass;
    case Objective::kMseLog:
    case Objective::kBerhu:
      return HeadKind::kRegression;
  }
  throw std::logic_error("unknown objective");
}

const std::vector<std::string>& all_variant_names() {
  static const std::vector<std::string> names = {
      "MSE", "MSE-SID", "MCC-UD", "MCC-SID", "DORN-UD", "DORN-SID", "berHu"};
  return names;
}

Variant parse_variant(std::string_view name) {
  const auto sid = Strategy::kSpacingIncreasing;
  const auto ud = Strategy::kUniform;
  Variant v;
  v.name = std::string(name);
  if (name == "MSE") {
    v.objective = Objective::kMseLog;
    v.strategy = sid;
  } else if (name == "MSE-SID") {
    v.objective = Objective::kMseLog;
    v.strategy = sid;
    v.quantize_targets = true;
  } else if (name == "MCC-UD") {
    v.objective = Objective::kMultiClass;
    v.strategy = ud;
  } else if (name == "MCC-SID") {
    v.objective = Objective::kMultiClass;
    v.strategy = sid;
  } else if (name == "DORN-UD") {
    v.objective = Objective::kOrdinal;
    v.strategy = ud;
  } else if (name == "DORN-SID") {
    v.objective = Objective::kOrdinal;
    v.strategy = sid;
  } else if (name == "berHu") {
    v.objective = Objective::kBerhu;
    v.strategy = sid;
  } else {
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
  }
  return v;
}

FeatureScaler FeatureScaler::identity(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

FeatureScaler FeatureScaler::fit(const std::vector<TrainingSample>& dataset) {
  FeatureScaler s = identity(kFeatureDim);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(kFeatureDim);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(kFeatureDim);
  double n = 0.0;
  for (const auto& sample : dataset) {
    const Volume f = extract_features(sample.image);
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
      const Eigen::Map<const Eigen::VectorXd> x(f.pixel(i).data(), kFeatureDim);
      sum += x;
      sum_sq += x.cwiseProduct(x);
      n += 1.0;
    }
  }
  if (n == 0.0) return s;
  for (int c = 0; c + 1 < kFeatureDim; ++c) {
    const double mean = sum[c] / n;
    const double var = std::max(0.0, sum_sq[c] / n - mean * mean);
    s.mean[c] = mean;
    s.scale[c] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return s;
}

void FeatureScaler::apply(Volume& features) const {
  if (features.channels() != mean.size()) {
    throw std::invalid_argument("FeatureScaler: channel count mismatch");
  }
  for (std::size_t i = 0; i < features.pixel_count(); ++i) {
    Eigen::Map<Eigen::VectorXd> x(features.pixel(i).data(), mean.size());
    x = (x - mean).cwiseQuotient(scale);
  }
}

Eigen::MatrixXd FeatureScaler::fold(const Eigen::MatrixXd& weights) const {
  const Eigen::Index bias = weights.cols() - 1;
  Eigen::MatrixXd raw = weights * scale.cwiseInverse().asDiagonal();
  raw.col(bias) = weights.col(bias) - raw.leftCols(bias) * mean.head(bias);
  return raw;
}

namespace {

/// dL/dW = sum_pixels dL/dy(p) x(p)^T
Eigen::MatrixXd weight_gradient(const Volume& output_grad,
                                const Volume& features) {
  const auto n = static_cast<Eigen::Index>(features.pixel_count());
  const Eigen::Map<const Eigen::MatrixXd> g(output_grad.values().data(),
                                            output_grad.channels(), n);
  const Eigen::Map<const Eigen::MatrixXd> x(features.values().data(),
                                            features.channels(), n);
  return g * x.transpose();
}

}  // namespace

HeadLoss head_loss(const LinearHead& head, Objective objective,
                   bool quantize_targets, const Volume& features,
                   const DepthMap& gt, const DiscretizationScheme& scheme) {
  if (features.width() != gt.width() || features.height() != gt.height()) {
    throw std::invalid_argument("head_loss: feature and depth shapes differ");
  }
  const PixelMask mask = gt.mask();
  const Volume outputs = head.forward(features);
  HeadLoss out;

  switch (objective) {
    case Objective::kOrdinal: {
      const LabelMap labels = scheme.label_map(gt.depth());
      const auto probs = pairwise_probabilities(OrdinalLogits(outputs));
      out.value = ordinal_loss(probs, labels, mask);
      out.grad = ordinal_gradient(features, probs, labels, mask);
      break;
    }
    case Objective::kMultiClass: {
      const LabelMap labels = scheme.label_map(gt.depth());
      const LogitLoss l = mcc_loss(outputs, labels, mask);
      out.value = l.value;
      out.grad = weight_gradient(l.grad, features);
      break;
    }
    case Objective::kMseLog:
    case Objective::kBerhu: {
      const double xi = scheme.shift();
      Grid2<double> target = gt.depth();
      if (quantize_targets) {
        for (std::size_t i = 0; i < target.size(); ++i) {
          if (mask[i]) {
            target[i] = scheme.decode_depth(scheme.depth_to_label(target[i]));
          }
        }
      }
      // The head regresses log(depth + xi).
      Grid2<double> pred(outputs.width(), outputs.height());
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = std::exp(outputs.pixel(i)[0]);
        if (mask[i] && !(e > 0.0 && std::isfinite(e))) {
          throw TrainingDiverged("regression output exp(y) left the "
                                 "representable range");
        }
        pred[i] = e - xi;
      }
      const DepthLoss l = objective == Objective::kMseLog
                              ? mse_log_loss(pred, target, mask, xi)
                              : berhu_loss(pred, target, mask);
      Volume gy(outputs.width(), outputs.height(), 1);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        gy.pixel(i)[0] = l.grad[i] * (pred[i] + xi);
      }
      out.value = l.value;
      out.grad = weight_gradient(gy, features);
      break;
    }
  }
  return out;
}

TrainResult train(const std::vector<TrainingSample>& dataset,
                  const DiscretizationScheme& scheme, const Variant& variant,
                  const TrainConfig& config) {
  if (variant.strategy != scheme.strategy()) {
    throw std::invalid_argument("train: variant " + variant.name +
                                " expects a " +
                                std::string(to_string(variant.strategy)) +
                                " scheme");
  }
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  for (const auto& s : dataset) {
    if (s.image.width() != s.depth.width() ||
        s.image.height() != s.depth.height()) {
      throw std::invalid_argument("train: image/depth shape mismatch");
    }
    if (s.image.width() < config.crop_width ||
        s.image.height() < config.crop_height) {
      throw std::invalid_argument("train: crop larger than a training image");
    }
  }
  if (config.crop_width < 1 || config.crop_height < 1) {
    throw std::invalid_argument("train: crop must be at least 1x1");
  }

  TrainResult result{LinearHead(variant.head_kind(), scheme.num_bins(),
                                kFeatureDim),
                     {}};
  const OptimizerConfig& opt = config.optimizer;
  if (opt.total_iters == 0) return result;
  opt.validate();

  const FeatureScaler scaler = config.standardize
                                  ? FeatureScaler::fit(dataset)
                                  : FeatureScaler::identity(kFeatureDim);
  // Weights in standardized coordinates; folded into result.head at the end.
  LinearHead head = result.head;

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
  std::bernoulli_distribution coin(0.5);

  const int cw = config.crop_width;
  const int ch = config.crop_height;
  const int batch = opt.batch_size;
  Eigen::MatrixXd velocity;
  Volume features(cw, ch * batch, kFeatureDim);
  DepthMap gt(cw, ch * batch);

  for (int iter = 0; iter < opt.total_iters; ++iter) {
    // Crops are stacked vertically into one batch volume.
    for (int b = 0; b < batch; ++b) {
      const auto& sample = dataset[pick(rng)];
      std::uniform_int_distribution<int> px(0, sample.image.width() - cw);
      std::uniform_int_distribution<int> py(0, sample.image.height() - ch);
      const int x0 = px(rng);
      const int y0 = py(rng);
      const bool flip = config.random_flip && coin(rng);
      Image img = crop(sample.image, x0, y0, cw, ch);
      DepthMap depth = crop(sample.depth, x0, y0, cw, ch);
      if (flip) {
        img = flip_horizontal(img);
        depth = flip_horizontal(depth);
      }
      Volume f = extract_features(img);
      scaler.apply(f);
      for (int y = 0; y < ch; ++y) {
        for (int x = 0; x < cw; ++x) {
          std::copy_n(f.pixel(x, y).begin(), kFeatureDim,
                      features.pixel(x, b * ch + y).begin());
          if (depth.is_valid(x, y)) {
            gt.set(x, b * ch + y, depth(x, y));
          } else {
            gt.invalidate(x, b * ch + y);
          }
        }
      }
    }
    if (gt.valid_count() == 0) continue;

    const HeadLoss loss = head_loss(head, variant.objective,
                                    variant.quantize_targets, features, gt,
                                    scheme);
    if (!std::isfinite(loss.value) || !loss.grad.allFinite()) {
      std::ostringstream msg;
      msg << variant.name << ": non-finite loss at iteration " << iter;
      throw TrainingDiverged(msg.str());
    }
    if (iter % kTraceInterval == 0) result.trace.push_back({iter, loss.value});
    sgd_step(head, loss.grad, opt, iter, velocity);
  }
  result.head = LinearHead(head.kind(), head.num_bins(),
                           scaler.fold(head.weights()));
  return result;
}

}  // namespace dorn
