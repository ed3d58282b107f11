#pragma once

#include <array>
#include <cstdint>

#include "dorn/grid.hpp"

namespace dorn {

/// Gray-level image, intensities nominally in [0, 1].
using Image = Grid2<double>;

/// Depth in meters with a validity mask. Invalid pixels always hold 0.
class DepthMap {
 public:
  DepthMap() = default;
  /// All-invalid map.
  DepthMap(int width, int height)
      : depth_(width, height, 0.0), valid_(width, height, 0) {}
  /// Every pixel valid.
  explicit DepthMap(Grid2<double> depth);
  DepthMap(Grid2<double> depth, Grid2<std::uint8_t> valid);

  int width() const { return depth_.width(); }
  int height() const { return depth_.height(); }

  const Grid2<double>& depth() const { return depth_; }
  const Grid2<std::uint8_t>& valid() const { return valid_; }
  bool is_valid(int x, int y) const { return valid_(x, y) != 0; }
  double operator()(int x, int y) const { return depth_(x, y); }

  void set(int x, int y, double depth);
  void invalidate(int x, int y);

  std::size_t valid_count() const;
  PixelMask mask() const { return PixelMask(valid_); }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  Grid2<double> depth_;
  Grid2<std::uint8_t> valid_;
};

/// Fixed feature channel layout produced by extract_features.
namespace channel {
inline constexpr int kIntensity = 0;
inline constexpr int kBoxMean = 1;   // radii 1, 2, 4, 8 -> channels 1..4
inline constexpr int kGradX = 5;     // radii 1, 2, 4, 8 -> channels 5..8
inline constexpr int kGradY = 9;     // radii 1, 2, 4, 8 -> channels 9..12
inline constexpr int kRow = 13;
inline constexpr int kCol = 14;
inline constexpr int kBias = 15;
}  // namespace channel

inline constexpr int kFeatureDim = 16;
inline constexpr std::array<int, 4> kFeatureRadii = {1, 2, 4, 8};

/// Box-filter mean over the (2r+1)^2 window, clamp-to-edge borders.
Image box_mean(const Image& image, int radius);

/// Per pixel, in order: intensity; box means at radii {1,2,4,8};
/// horizontal differences (B_r(x+r) - B_r(x-r)) / 2 of those box means;
/// vertical differences likewise; row / (H-1); col / (W-1); constant 1.
Volume extract_features(const Image& image);

Image crop(const Image& image, int x0, int y0, int width, int height);
DepthMap crop(const DepthMap& map, int x0, int y0, int width, int height);

Image flip_horizontal(const Image& image);
DepthMap flip_horizontal(const DepthMap& map);

}  // namespace dorn
