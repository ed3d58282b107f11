#include "dorn/encoder_budget.hpp"

#include <stdexcept>

namespace dorn {

void EncoderConfig::validate() const {
  if (in_channels < 1 || out_channels < 1 || hidden < 1 || pool < 1 ||
      height < 1 || width < 1 || downsample < 1) {
    throw std::invalid_argument("encoder config fields must be positive");
  }
}

std::int64_t params_fc_fashion(const EncoderConfig& c) {
  c.validate();
  __extension__ typedef __int128 Wide;
  const Wide area = Wide{c.width} * c.height;
  const Wide numer = area * c.hidden * c.in_channels +
                     area * c.out_channels * c.hidden;
  const Wide denom = Wide{c.downsample} * c.downsample;
  const Wide rounded = (2 * numer + denom) / (2 * denom);
  const Wide total = rounded + Wide{c.hidden} * c.hidden;
  if (total > Wide{INT64_MAX}) {
    throw std::overflow_error("params_fc_fashion: count exceeds int64");
  }
  return static_cast<std::int64_t>(total);
}

std::int64_t params_pooled_encoder(const EncoderConfig& c) {
  c.validate();
  __extension__ typedef __int128 Wide;
  const Wide total = Wide{c.out_channels} * (c.width / c.pool) *
                         (c.height / c.pool) * c.in_channels +
                     Wide{c.out_channels} * c.out_channels;
  if (total > Wide{INT64_MAX}) {
    throw std::overflow_error("params_pooled_encoder: count exceeds int64");
  }
  return static_cast<std::int64_t>(total);
}

}  // namespace dorn
