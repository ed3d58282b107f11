#pragma once

#include <Eigen/Core>

#include "dorn/discretization.hpp"
#include "dorn/grid.hpp"

namespace dorn {

/// Per-pixel ordinal logits y_0 .. y_{2K-1}. Pair (y_{2k}, y_{2k+1}) scores
/// the binary question "is the label greater than k".
class OrdinalLogits {
 public:
  OrdinalLogits() = default;
  explicit OrdinalLogits(Volume values);
  OrdinalLogits(int width, int height, int num_bins)
      : OrdinalLogits(Volume(width, height, 2 * num_bins)) {}

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  int num_bins() const { return values_.channels() / 2; }
  const Volume& values() const { return values_; }
  Volume& values() { return values_; }

 private:
  Volume values_;
};

/// Per-pixel P^k = P(label > k), k in [0, K).
class OrdinalProbabilities {
 public:
  OrdinalProbabilities() = default;
  explicit OrdinalProbabilities(Volume values);

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  int num_bins() const { return values_.channels(); }
  const Volume& values() const { return values_; }

 private:
  Volume values_;
};

/// Floor/ceiling applied to probabilities before taking logs in the loss.
inline constexpr double kProbabilityEpsilon = 1e-12;

/// Two-way softmax over each logit pair, evaluated as a logistic of the
/// pair difference so large logits cannot overflow.
OrdinalProbabilities pairwise_probabilities(const OrdinalLogits& logits);

/// Mean negative ordinal log-likelihood over masked-in pixels:
///   L = -(1/N) sum_pixels [ sum_{k<l} log P^k + sum_{k>=l} log(1 - P^k) ].
double ordinal_loss(const OrdinalProbabilities& probs, const LabelMap& labels,
                    const PixelMask& mask);

/// dL/dy over the W x H x 2K logit volume. Masked-out pixels get zero.
/// Odd channels are the exact negation of the even ones.
Volume ordinal_logit_gradient(const OrdinalProbabilities& probs,
                              const LabelMap& labels, const PixelMask& mask);

/// dL/dTheta for a linear head y_i = theta_i . x, as a 2K x C matrix where
/// C is the feature dimension.
Eigen::MatrixXd ordinal_gradient(const Volume& features,
                                 const OrdinalProbabilities& probs,
                                 const LabelMap& labels,
                                 const PixelMask& mask);

/// l_hat = #{k : P^k >= 0.5}, clamped to K - 1.
LabelMap decode_labels(const OrdinalProbabilities& probs);

}  // namespace dorn
