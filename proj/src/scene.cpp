#include "dorn/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace dorn {

void SceneSpec::validate() const {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("scene: zero-area image");
  }
  if (!(depth_min > 0.0) || !(depth_max > depth_min) ||
      !std::isfinite(depth_max)) {
    throw std::invalid_argument("scene: need 0 < depth_min < depth_max");
  }
  if (num_shapes < 0) throw std::invalid_argument("scene: num_shapes < 0");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("scene: sigma < 0");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw std::invalid_argument("scene: sparsity must be in [0, 1)");
  }
  if (!(albedo_spread >= 0.0)) {
    throw std::invalid_argument("scene: albedo_spread must be >= 0");
  }
  if (!(contrast > 0.0)) {
    throw std::invalid_argument("scene: contrast must be > 0");
  }
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width;
  const int h = spec.height;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double log_min = std::log(spec.depth_min);
  const double log_max = std::log(spec.depth_max);

  Grid2<double> depth(w, h);
  Grid2<int> surface(w, h, 0);
  for (int y = 0; y < h; ++y) {
    // Far at the top row, near at the bottom, geometric in between.
    const double t = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
    const double d = std::exp(log_max + (log_min - log_max) * t);
    for (int x = 0; x < w; ++x) depth(x, y) = d;
  }

  std::vector<double> albedo = {0.0};
  for (int s = 0; s < spec.num_shapes; ++s) {
    const int rw = std::max(1, static_cast<int>(w * (0.125 + 0.2 * unit(rng))));
    const int rh = std::max(1, static_cast<int>(h * (0.125 + 0.2 * unit(rng))));
    const int x0 = static_cast<int>(unit(rng) * (w - rw + 1));
    const int y0 = static_cast<int>(unit(rng) * (h - rh + 1));
    const double d = std::exp(log_min + (log_max - log_min) * unit(rng));
    albedo.push_back(spec.albedo_spread * (unit(rng) - 0.5));
    for (int y = y0; y < std::min(h, y0 + rh); ++y) {
      for (int x = x0; x < std::min(w, x0 + rw); ++x) {
        depth(x, y) = d;
        surface(x, y) = s + 1;
      }
    }
  }
  for (auto& d : depth.values()) {
    d = std::clamp(d, spec.depth_min, spec.depth_max);
  }

  Image image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double noisy =
          depth(x, y) * (1.0 + spec.noise_sigma * normal(rng));
      const double u = (std::log(std::max(noisy, 1e-9)) - log_min) /
                       (log_max - log_min);
      const double v = 0.5 - 0.5 * std::tanh(spec.contrast * (u - 0.5)) +
                       albedo[surface(x, y)];
      image(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }

  Grid2<std::uint8_t> valid(w, h, 1);
  const auto n = valid.size();
  const auto n_invalid =
      static_cast<std::size_t>(std::llround(spec.sparsity * n));
  if (n_invalid > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < std::min(n_invalid, n - 1); ++i) {
      valid[order[i]] = 0;
    }
  }
  return Scene{std::move(image), DepthMap(std::move(depth), std::move(valid))};
}

}  // namespace dorn
