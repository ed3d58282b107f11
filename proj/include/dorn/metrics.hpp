#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "dorn/features.hpp"

namespace dorn {

/// Depth range [min, max] in meters that selects ground-truth pixels and
/// clamps predictions.
struct DepthCap {
  double min = 1e-3;
  double max = 80.0;
};

/// Standard depth-estimation metrics over one evaluation set. Inverse-depth
/// errors (irmse, imae) are in 1/km.
struct MetricsReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  double log10_mae = 0.0;
  double silog = 0.0;
  double irmse = 0.0;
  double imae = 0.0;
  double scale_inv = 0.0;
  std::size_t n_pixels = 0;
};

/// Evaluation set: pixels valid in gt with cap.min <= gt <= cap.max.
/// Predictions are clamped to the cap. With e = ln(pred) - ln(gt),
/// scale_inv = mean(e^2) - mean(e)^2 (accumulated with Welford updates)
/// and silog = sqrt(scale_inv).
/// Delta thresholds use strict max(pred/gt, gt/pred) < 1.25^i.
MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                       DepthCap cap = {});

inline constexpr std::size_t kMetricCount = 12;

struct MetricInfo {
  std::string_view name;
  bool higher_is_better;
  double MetricsReport::*field;
};

/// Fixed column order used by every serialization of a report.
const std::array<MetricInfo, kMetricCount>& metric_table();

enum class Comparison { kBetter, kWorse, kTie };

/// Per-metric verdict for `a` relative to `b`, honoring polarity.
struct ReportComparison {
  std::array<Comparison, kMetricCount> verdicts{};
  Comparison on(std::string_view metric) const;
  int better_count() const;
  int worse_count() const;
};

ReportComparison compare_reports(const MetricsReport& a,
                                 const MetricsReport& b);

/// Element-wise mean of the metric fields; n_pixels is summed.
MetricsReport average_reports(std::span<const MetricsReport> reports);

/// `n_pixels,delta1,delta2,delta3,abs_rel,sq_rel,rmse,rmse_log,log10_mae,
/// silog,irmse,imae,scale_inv`
std::string csv_header();
std::string to_csv(const MetricsReport& r);
void print_table(std::ostream& os, const MetricsReport& r);

}  // namespace dorn
