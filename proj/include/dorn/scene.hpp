#pragma once

#include <cstdint>

#include "dorn/features.hpp"

namespace dorn {

/// Parameters of a synthetic depth scene: a ground plane receding toward the
/// top of the frame, occluded by fronto-parallel rectangles.
struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 48;
  double depth_min = 1.0;
  double depth_max = 80.0;
  int num_shapes = 4;
  /// Depth noise standard deviation as a fraction of depth.
  double noise_sigma = 0.05;
  /// Fraction of pixels whose ground truth is withheld.
  double sparsity = 0.0;
  /// Steepness of the intensity response to normalized log depth.
  double contrast = 2.5;
  /// Per-surface intensity offsets are uniform in [-spread/2, spread/2].
  double albedo_spread = 0.06;

  void validate() const;
};

struct Scene {
  Image image;
  DepthMap depth;
};

/// Deterministic for a given spec. A pixel at depth d on surface s observes
/// d' = d (1 + sigma n), n standard normal, and has intensity
///   0.5 - 0.5 tanh(contrast (u - 1/2)) + albedo(s),  clamped to [0, 1],
/// where u = log(d' / depth_min) / log(depth_max / depth_min).
Scene generate_scene(const SceneSpec& spec);

}  // namespace dorn
