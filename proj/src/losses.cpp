#include "dorn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dorn {

namespace {

void check_pair(const Grid2<double>& pred, const Grid2<double>& gt,
                const PixelMask& mask) {
  if (!pred.same_shape(gt) || pred.width() != mask.width() ||
      pred.height() != mask.height()) {
    throw std::invalid_argument("loss inputs have mismatched dimensions");
  }
  if (mask.count() == 0) {
    throw std::invalid_argument("loss mask selects no pixels");
  }
}

}  // namespace

DepthLoss mse_log_loss(const Grid2<double>& pred, const Grid2<double>& gt,
                       const PixelMask& mask, double xi) {
  check_pair(pred, gt, mask);
  const double n = static_cast<double>(mask.count());
  DepthLoss out{0.0, Grid2<double>(pred.width(), pred.height())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    const double p = pred[i] + xi;
    const double g = gt[i] + xi;
    if (!(p > 0.0) || !(g > 0.0)) {
      throw std::invalid_argument("mse_log_loss: nonpositive shifted depth");
    }
    const double e = std::log(p) - std::log(g);
    out.value += e * e;
    out.grad[i] = 2.0 * e / (p * n);
  }
  out.value /= n;
  return out;
}

DepthLoss berhu_loss(const Grid2<double>& pred, const Grid2<double>& gt,
                     const PixelMask& mask) {
  check_pair(pred, gt, mask);
  const double n = static_cast<double>(mask.count());
  DepthLoss out{0.0, Grid2<double>(pred.width(), pred.height())};

  double max_r = 0.0;
  std::size_t argmax = 0;
  bool found = false;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    const double r = std::abs(pred[i] - gt[i]);
    if (!found || r > max_r) {
      max_r = r;
      argmax = i;
      found = true;
    }
  }
  if (max_r == 0.0) return out;

  const double c = kBerhuCutoffFraction * max_r;
  double dloss_dc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    const double e = pred[i] - gt[i];
    const double r = std::abs(e);
    if (r <= c) {
      out.value += r;
      out.grad[i] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) / n;
    } else {
      out.value += (r * r + c * c) / (2.0 * c);
      out.grad[i] = e / (c * n);
      dloss_dc += 0.5 - (r * r) / (2.0 * c * c);
    }
  }
  out.value /= n;
  // c = 0.2 * |e_argmax|
  const double e_max = pred[argmax] - gt[argmax];
  out.grad[argmax] +=
      dloss_dc / n * kBerhuCutoffFraction * (e_max > 0.0 ? 1.0 : -1.0);
  return out;
}

LogitLoss mcc_loss(const Volume& logits, const LabelMap& labels,
                   const PixelMask& mask) {
  const int k = logits.channels();
  if (k < 1) throw std::invalid_argument("mcc_loss: need K >= 1 classes");
  if (!labels.same_shape(logits.width(), logits.height()) ||
      mask.width() != logits.width() || mask.height() != logits.height()) {
    throw std::invalid_argument("mcc_loss: mismatched dimensions");
  }
  if (mask.count() == 0) {
    throw std::invalid_argument("mcc_loss: mask selects no pixels");
  }
  const double n = static_cast<double>(mask.count());
  LogitLoss out{0.0, Volume(logits.width(), logits.height(), k)};
  for (std::size_t i = 0; i < logits.pixel_count(); ++i) {
    if (!mask[i]) continue;
    const int l = labels[i];
    if (l < 0 || l >= k) {
      throw std::invalid_argument("mcc_loss: label outside [0, K)");
    }
    const auto y = logits.pixel(i);
    auto g = out.grad.pixel(i);
    const double m = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (int j = 0; j < k; ++j) z += std::exp(y[j] - m);
    const double log_z = m + std::log(z);
    out.value += log_z - y[l];
    for (int j = 0; j < k; ++j) {
      g[j] = (std::exp(y[j] - log_z) - (j == l ? 1.0 : 0.0)) / n;
    }
  }
  out.value /= n;
  return out;
}

}  // namespace dorn
