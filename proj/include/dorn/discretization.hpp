#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dorn/grid.hpp"

namespace dorn {

enum class Strategy { kUniform, kSpacingIncreasing };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

/// Discrete ordinal labels, each in [0, K).
using LabelMap = Grid2<int>;

/// Threshold set t_0 < ... < t_K over the shifted depth range
/// [alpha + xi, beta + xi], with xi chosen so that alpha + xi == 1.
///
/// Uniform spacing places thresholds linearly; spacing-increasing places them
/// uniformly in log space, so bins widen with depth. Depths are mapped to the
/// half-open bin t_l <= d + xi < t_{l+1}; out-of-range depths clamp to the
/// first or last bin.
class DiscretizationScheme {
 public:
  static DiscretizationScheme build(Strategy strategy, double alpha,
                                    double beta, int num_bins);

  Strategy strategy() const { return strategy_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double shift() const { return xi_; }
  int num_bins() const { return static_cast<int>(thresholds_.size()) - 1; }
  const std::vector<double>& thresholds() const { return thresholds_; }

  /// Bin index l with t_l <= depth + xi < t_{l+1}. Uses a closed form
  /// (division or log) corrected against the stored thresholds.
  int depth_to_label(double depth) const;

  /// Midpoint of bin `label` minus the shift. Label K is accepted and
  /// decodes as K - 1 (the ordinal count can reach K).
  double decode_depth(int label) const;

  double bin_width(int label) const;

  LabelMap label_map(const Grid2<double>& depth) const;

  /// `strategy,alpha,beta,K`; thresholds are re-derived on parse.
  std::string serialize() const;
  static DiscretizationScheme parse(std::string_view record);

  friend bool operator==(const DiscretizationScheme& a,
                         const DiscretizationScheme& b) {
    return a.strategy_ == b.strategy_ && a.alpha_ == b.alpha_ &&
           a.beta_ == b.beta_ && a.num_bins() == b.num_bins();
  }

 private:
  DiscretizationScheme() = default;

  Strategy strategy_ = Strategy::kSpacingIncreasing;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double xi_ = 0.0;
  std::vector<double> thresholds_;
};

}  // namespace dorn
