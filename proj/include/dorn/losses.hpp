#pragma once

#include "dorn/discretization.hpp"
#include "dorn/grid.hpp"

namespace dorn {

/// Scalar loss plus its gradient with respect to each predicted depth.
struct DepthLoss {
  double value = 0.0;
  Grid2<double> grad;
};

/// Mean over masked pixels of (log(pred + xi) - log(gt + xi))^2.
DepthLoss mse_log_loss(const Grid2<double>& pred, const Grid2<double>& gt,
                       const PixelMask& mask, double xi);

/// Reverse Huber: r = |pred - gt|; r if r <= c, else (r^2 + c^2) / (2c),
/// with c = 0.2 * max masked residual. The gradient accounts for c moving
/// with the largest residual, so it is the true derivative of the value.
DepthLoss berhu_loss(const Grid2<double>& pred, const Grid2<double>& gt,
                     const PixelMask& mask);

inline constexpr double kBerhuCutoffFraction = 0.2;

/// Scalar loss plus gradient with respect to a logit volume.
struct LogitLoss {
  double value = 0.0;
  Volume grad;
};

/// Masked mean softmax cross-entropy over K classes. Gradient is
/// (softmax - onehot) / N.
LogitLoss mcc_loss(const Volume& logits, const LabelMap& labels,
                   const PixelMask& mask);

}  // namespace dorn
