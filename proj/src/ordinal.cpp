#include "dorn/ordinal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dorn {

namespace {

void check_labels(const LabelMap& labels, int width, int height,
                  int num_bins) {
  if (!labels.same_shape(width, height)) {
    throw std::invalid_argument("label map dimensions do not match");
  }
  for (int l : labels.values()) {
    if (l < 0 || l >= num_bins) {
      throw std::invalid_argument("label outside [0, K)");
    }
  }
}

void check_mask(const PixelMask& mask, int width, int height) {
  if (mask.width() != width || mask.height() != height) {
    throw std::invalid_argument("mask dimensions do not match");
  }
  if (mask.count() == 0) {
    throw std::invalid_argument("mask selects no pixels");
  }
}

// dPsi/dy_{2k} for one pixel.
double even_logit_term(double p, int label, int k) {
  return label > k ? p - 1.0 : p;
}

}  // namespace

OrdinalLogits::OrdinalLogits(Volume values) : values_(std::move(values)) {
  if (values_.channels() == 0 || values_.channels() % 2 != 0) {
    throw std::invalid_argument("ordinal logits need 2K channels, K >= 1");
  }
}

OrdinalProbabilities::OrdinalProbabilities(Volume values)
    : values_(std::move(values)) {
  if (values_.channels() == 0) {
    throw std::invalid_argument("ordinal probabilities need K >= 1");
  }
}

OrdinalProbabilities pairwise_probabilities(const OrdinalLogits& logits) {
  const int k = logits.num_bins();
  const Volume& y = logits.values();
  Volume p(y.width(), y.height(), k);
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    const auto in = y.pixel(i);
    auto out = p.pixel(i);
    for (int j = 0; j < k; ++j) {
      const double a = in[2 * j];
      const double b = in[2 * j + 1];
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("pairwise_probabilities: non-finite logit");
      }
      // e^b / (e^a + e^b) after subtracting max(a, b).
      const double m = std::max(a, b);
      const double ea = std::exp(a - m);
      const double eb = std::exp(b - m);
      out[j] = eb / (ea + eb);
    }
  }
  return OrdinalProbabilities(std::move(p));
}

double ordinal_loss(const OrdinalProbabilities& probs, const LabelMap& labels,
                    const PixelMask& mask) {
  const int k = probs.num_bins();
  check_labels(labels, probs.width(), probs.height(), k);
  check_mask(mask, probs.width(), probs.height());

  const Volume& p = probs.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    if (!mask[i]) continue;
    const auto pk = p.pixel(i);
    const int l = labels[i];
    double psi = 0.0;
    for (int j = 0; j < k; ++j) {
      const double q =
          std::clamp(pk[j], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
      psi += j < l ? std::log(q) : std::log1p(-q);
    }
    total += psi;
  }
  return -total / static_cast<double>(mask.count());
}

Volume ordinal_logit_gradient(const OrdinalProbabilities& probs,
                              const LabelMap& labels, const PixelMask& mask) {
  const int k = probs.num_bins();
  check_labels(labels, probs.width(), probs.height(), k);
  check_mask(mask, probs.width(), probs.height());

  const Volume& p = probs.values();
  const double scale = -1.0 / static_cast<double>(mask.count());
  Volume grad(p.width(), p.height(), 2 * k);
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    if (!mask[i]) continue;
    const auto pk = p.pixel(i);
    auto g = grad.pixel(i);
    for (int j = 0; j < k; ++j) {
      const double even = scale * even_logit_term(pk[j], labels[i], j);
      g[2 * j] = even;
      g[2 * j + 1] = -even;
    }
  }
  return grad;
}

Eigen::MatrixXd ordinal_gradient(const Volume& features,
                                 const OrdinalProbabilities& probs,
                                 const LabelMap& labels,
                                 const PixelMask& mask) {
  if (features.width() != probs.width() ||
      features.height() != probs.height()) {
    throw std::invalid_argument(
        "ordinal_gradient: feature and probability dimensions differ");
  }
  const int k = probs.num_bins();
  check_labels(labels, probs.width(), probs.height(), k);
  check_mask(mask, probs.width(), probs.height());

  const int c = features.channels();
  const Volume& p = probs.values();
  const double scale = -1.0 / static_cast<double>(mask.count());

  // Accumulate the even rows; odd rows are their negation.
  Eigen::MatrixXd even = Eigen::MatrixXd::Zero(k, c);
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    if (!mask[i]) continue;
    const auto pk = p.pixel(i);
    const Eigen::Map<const Eigen::VectorXd> x(features.pixel(i).data(), c);
    for (int j = 0; j < k; ++j) {
      even.row(j) += even_logit_term(pk[j], labels[i], j) * x.transpose();
    }
  }
  even *= scale;

  Eigen::MatrixXd grad(2 * k, c);
  for (int j = 0; j < k; ++j) {
    grad.row(2 * j) = even.row(j);
    grad.row(2 * j + 1) = -even.row(j);
  }
  return grad;
}

LabelMap decode_labels(const OrdinalProbabilities& probs) {
  const int k = probs.num_bins();
  const Volume& p = probs.values();
  LabelMap labels(p.width(), p.height());
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    int count = 0;
    for (double v : p.pixel(i)) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::invalid_argument("decode_labels: invalid probability");
      }
      if (v >= 0.5) ++count;
    }
    labels[i] = std::min(count, k - 1);
  }
  return labels;
}

}  // namespace dorn
