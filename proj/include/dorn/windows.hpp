#pragma once

#include <functional>
#include <vector>

#include "dorn/discretization.hpp"
#include "dorn/features.hpp"
#include "dorn/heads.hpp"

namespace dorn {

struct WindowSize {
  int width = 0;
  int height = 0;
};

/// Window start offsets along one axis: 0, stride, 2*stride, ... with the
/// last window snapped so it ends exactly at `length`. A stride larger than
/// the window is rejected since it would leave pixels uncovered.
std::vector<int> window_origins(int length, int window, int stride);

/// Predicts a window of the image at (x0, y0) with the given size.
using WindowPredictor =
    std::function<Grid2<double>(int x0, int y0, int width, int height)>;

/// Tiles a width x height image with overlapping windows and averages the
/// per-window predictions at every pixel. Windows are visited row-major so
/// the accumulation order is fixed.
Grid2<double> average_windows(int width, int height, WindowSize window,
                              WindowSize stride,
                              const WindowPredictor& predictor);

/// Windowed prediction: each window is cropped from the image, featurized
/// on its own and decoded by the head. All pixels of the result are valid.
DepthMap predict_windows(const LinearHead& head, const Image& image,
                         const DiscretizationScheme& scheme, WindowSize window,
                         WindowSize stride);

}  // namespace dorn
