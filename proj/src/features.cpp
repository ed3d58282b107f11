#include "dorn/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dorn {

DepthMap::DepthMap(Grid2<double> depth)
    : DepthMap(depth, Grid2<std::uint8_t>(depth.width(), depth.height(), 1)) {}

DepthMap::DepthMap(Grid2<double> depth, Grid2<std::uint8_t> valid)
    : depth_(std::move(depth)), valid_(std::move(valid)) {
  if (!depth_.same_shape(valid_)) {
    throw std::invalid_argument("DepthMap: depth and mask shapes differ");
  }
  for (std::size_t i = 0; i < depth_.size(); ++i) {
    if (!valid_[i]) {
      depth_[i] = 0.0;
      continue;
    }
    valid_[i] = 1;
    if (!std::isfinite(depth_[i]) || depth_[i] < 0.0) {
      throw std::invalid_argument(
          "DepthMap: valid pixels need finite depth >= 0");
    }
  }
}

void DepthMap::set(int x, int y, double depth) {
  if (!std::isfinite(depth) || depth < 0.0) {
    throw std::invalid_argument("DepthMap::set: depth must be finite, >= 0");
  }
  depth_(x, y) = depth;
  valid_(x, y) = 1;
}

void DepthMap::invalidate(int x, int y) {
  depth_(x, y) = 0.0;
  valid_(x, y) = 0;
}

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid_.values()) n += v;
  return n;
}

Image box_mean(const Image& image, int radius) {
  const int w = image.width();
  const int h = image.height();
  const double norm = 1.0 / (2 * radius + 1);
  Image horiz(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        s += image(std::clamp(x + d, 0, w - 1), y);
      }
      horiz(x, y) = s * norm;
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        s += horiz(x, std::clamp(y + d, 0, h - 1));
      }
      out(x, y) = s * norm;
    }
  }
  return out;
}

Volume extract_features(const Image& image) {
  const int w = image.width();
  const int h = image.height();
  Volume f(w, h, kFeatureDim);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f(x, y, channel::kIntensity) = image(x, y);
      f(x, y, channel::kRow) = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      f(x, y, channel::kCol) = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      f(x, y, channel::kBias) = 1.0;
    }
  }
  for (std::size_t i = 0; i < kFeatureRadii.size(); ++i) {
    const int r = kFeatureRadii[i];
    const int c = static_cast<int>(i);
    const Image b = box_mean(image, r);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        f(x, y, channel::kBoxMean + c) = b(x, y);
        f(x, y, channel::kGradX + c) =
            0.5 * (b(std::min(x + r, w - 1), y) - b(std::max(x - r, 0), y));
        f(x, y, channel::kGradY + c) =
            0.5 * (b(x, std::min(y + r, h - 1)) - b(x, std::max(y - r, 0)));
      }
    }
  }
  return f;
}

namespace {

void check_crop(int img_w, int img_h, int x0, int y0, int width, int height) {
  if (width < 1 || height < 1 || x0 < 0 || y0 < 0 || x0 + width > img_w ||
      y0 + height > img_h) {
    throw std::invalid_argument("crop rectangle outside the image");
  }
}

template <typename T>
Grid2<T> crop_grid(const Grid2<T>& g, int x0, int y0, int width, int height) {
  check_crop(g.width(), g.height(), x0, y0, width, height);
  Grid2<T> out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = g(x0 + x, y0 + y);
  }
  return out;
}

template <typename T>
Grid2<T> flip_grid(const Grid2<T>& g) {
  Grid2<T> out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) out(x, y) = g(g.width() - 1 - x, y);
  }
  return out;
}

}  // namespace

Image crop(const Image& image, int x0, int y0, int width, int height) {
  return crop_grid(image, x0, y0, width, height);
}

DepthMap crop(const DepthMap& map, int x0, int y0, int width, int height) {
  return DepthMap(crop_grid(map.depth(), x0, y0, width, height),
                  crop_grid(map.valid(), x0, y0, width, height));
}

Image flip_horizontal(const Image& image) { return flip_grid(image); }

DepthMap flip_horizontal(const DepthMap& map) {
  return DepthMap(flip_grid(map.depth()), flip_grid(map.valid()));
}

}  // namespace dorn
