#include "dorn/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dorn {

std::vector<int> window_origins(int length, int window, int stride) {
  if (window < 1 || stride < 1) {
    throw std::invalid_argument("window and stride must be >= 1");
  }
  if (window > length) {
    throw std::invalid_argument("window larger than the image");
  }
  if (stride > window) {
    throw std::invalid_argument("stride larger than the window leaves gaps");
  }
  std::vector<int> origins;
  for (int o = 0; o + window < length; o += stride) origins.push_back(o);
  const int last = length - window;
  if (origins.empty() || origins.back() != last) origins.push_back(last);
  return origins;
}

Grid2<double> average_windows(int width, int height, WindowSize window,
                              WindowSize stride,
                              const WindowPredictor& predictor) {
  const auto xs = window_origins(width, window.width, stride.width);
  const auto ys = window_origins(height, window.height, stride.height);
  Grid2<double> sum(width, height, 0.0);
  Grid2<int> count(width, height, 0);
  for (int y0 : ys) {
    for (int x0 : xs) {
      const Grid2<double> part = predictor(x0, y0, window.width, window.height);
      if (!part.same_shape(window.width, window.height)) {
        throw std::logic_error("window predictor returned the wrong shape");
      }
      for (int y = 0; y < window.height; ++y) {
        for (int x = 0; x < window.width; ++x) {
          sum(x0 + x, y0 + y) += part(x, y);
          count(x0 + x, y0 + y) += 1;
        }
      }
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] /= count[i];
  return sum;
}

DepthMap predict_windows(const LinearHead& head, const Image& image,
                         const DiscretizationScheme& scheme, WindowSize window,
                         WindowSize stride) {
  auto averaged = average_windows(
      image.width(), image.height(), window, stride,
      [&](int x0, int y0, int w, int h) {
        return predict(head, extract_features(crop(image, x0, y0, w, h)),
                       scheme);
      });
  // Regression heads can decode below zero or overflow.
  for (auto& d : averaged.values()) {
    if (std::isnan(d) || d < 0.0) d = 0.0;
    d = std::min(d, std::numeric_limits<double>::max());
  }
  return DepthMap(std::move(averaged));
}

}  // namespace dorn
