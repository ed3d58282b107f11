#pragma once

#include <cstdint>

namespace dorn {

/// Dimensions of a full-image encoder sitting on a C x h x w feature map.
struct EncoderConfig {
  std::int64_t in_channels = 512;   // C
  std::int64_t out_channels = 512;  // script C
  std::int64_t hidden = 2048;       // m, fc width
  std::int64_t pool = 4;            // k, pooling kernel and stride
  std::int64_t height = 49;
  std::int64_t width = 65;
  std::int64_t downsample = 3;      // input stride of the fc-fashion variant

  void validate() const;
};

/// Fully connected encoder on an input downsampled by `downsample` in both
/// dimensions: (w h / s^2) m C + m^2 + (w h / s^2) script_C m, rounded to
/// the nearest integer.
std::int64_t params_fc_fashion(const EncoderConfig& config);

/// Pooled encoder: script_C * floor(w/k) * floor(h/k) * C + script_C^2.
std::int64_t params_pooled_encoder(const EncoderConfig& config);

}  // namespace dorn
