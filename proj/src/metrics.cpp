#include "dorn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dorn {

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                       DepthCap cap) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw std::invalid_argument("evaluate: prediction and ground truth "
                                "dimensions differ");
  }
  if (!(cap.max > cap.min)) {
    throw std::invalid_argument("evaluate: cap.max must exceed cap.min");
  }

  const double t1 = 1.25;
  const double t2 = t1 * t1;
  const double t3 = t2 * t1;

  std::size_t n = 0;
  double d1 = 0, d2 = 0, d3 = 0;
  double abs_rel = 0, sq_rel = 0, sq = 0, sq_log = 0, log10_abs = 0;
  double inv_sq = 0, inv_abs = 0;
  // Running mean and squared deviation of e (Welford), stable when e is
  // nearly constant.
  double mean_e = 0, m2_e = 0;

  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.is_valid(x, y)) continue;
      const double g = gt(x, y);
      if (g < cap.min || g > cap.max) continue;
      const double p = std::clamp(pred(x, y), cap.min, cap.max);
      if (!(g > 0.0) || !(p > 0.0)) {
        throw std::invalid_argument(
            "evaluate: nonpositive depth in the evaluation set");
      }
      ++n;
      const double ratio = std::max(p / g, g / p);
      d1 += ratio < t1;
      d2 += ratio < t2;
      d3 += ratio < t3;
      const double diff = p - g;
      abs_rel += std::abs(diff) / g;
      sq_rel += diff * diff / g;
      sq += diff * diff;
      const double e = std::log(p) - std::log(g);
      sq_log += e * e;
      const double dev = e - mean_e;
      mean_e += dev / static_cast<double>(n);
      m2_e += dev * (e - mean_e);
      log10_abs += std::abs(std::log10(p) - std::log10(g));
      const double inv = 1000.0 / p - 1000.0 / g;
      inv_sq += inv * inv;
      inv_abs += std::abs(inv);
    }
  }
  if (n == 0) throw std::invalid_argument("evaluate: empty evaluation set");

  const double nn = static_cast<double>(n);
  MetricsReport r;
  r.n_pixels = n;
  r.delta1 = d1 / nn;
  r.delta2 = d2 / nn;
  r.delta3 = d3 / nn;
  r.abs_rel = abs_rel / nn;
  r.sq_rel = sq_rel / nn;
  r.rmse = std::sqrt(sq / nn);
  r.rmse_log = std::sqrt(sq_log / nn);
  r.log10_mae = log10_abs / nn;
  r.scale_inv = std::max(0.0, m2_e / nn);
  r.silog = std::sqrt(r.scale_inv);
  r.irmse = std::sqrt(inv_sq / nn);
  r.imae = inv_abs / nn;
  return r;
}

const std::array<MetricInfo, kMetricCount>& metric_table() {
  static const std::array<MetricInfo, kMetricCount> table = {{
      {"delta1", true, &MetricsReport::delta1},
      {"delta2", true, &MetricsReport::delta2},
      {"delta3", true, &MetricsReport::delta3},
      {"abs_rel", false, &MetricsReport::abs_rel},
      {"sq_rel", false, &MetricsReport::sq_rel},
      {"rmse", false, &MetricsReport::rmse},
      {"rmse_log", false, &MetricsReport::rmse_log},
      {"log10_mae", false, &MetricsReport::log10_mae},
      {"silog", false, &MetricsReport::silog},
      {"irmse", false, &MetricsReport::irmse},
      {"imae", false, &MetricsReport::imae},
      {"scale_inv", false, &MetricsReport::scale_inv},
  }};
  return table;
}

Comparison ReportComparison::on(std::string_view metric) const {
  const auto& table = metric_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].name == metric) return verdicts[i];
  }
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

int ReportComparison::better_count() const {
  return static_cast<int>(
      std::count(verdicts.begin(), verdicts.end(), Comparison::kBetter));
}

int ReportComparison::worse_count() const {
  return static_cast<int>(
      std::count(verdicts.begin(), verdicts.end(), Comparison::kWorse));
}

ReportComparison compare_reports(const MetricsReport& a,
                                 const MetricsReport& b) {
  if (a.n_pixels != b.n_pixels) {
    throw std::invalid_argument(
        "compare_reports: reports cover different evaluation sets");
  }
  ReportComparison out;
  const auto& table = metric_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double va = a.*table[i].field;
    const double vb = b.*table[i].field;
    if (va == vb) {
      out.verdicts[i] = Comparison::kTie;
    } else if ((va > vb) == table[i].higher_is_better) {
      out.verdicts[i] = Comparison::kBetter;
    } else {
      out.verdicts[i] = Comparison::kWorse;
    }
  }
  return out;
}

MetricsReport average_reports(std::span<const MetricsReport> reports) {
  if (reports.empty()) {
    throw std::invalid_argument("average_reports: no reports");
  }
  MetricsReport out;
  for (const auto& r : reports) {
    for (const auto& m : metric_table()) out.*m.field += r.*m.field;
    out.n_pixels += r.n_pixels;
  }
  for (const auto& m : metric_table()) {
    out.*m.field /= static_cast<double>(reports.size());
  }
  return out;
}

std::string csv_header() {
  std::string s = "n_pixels";
  for (const auto& m : metric_table()) {
    s += ',';
    s += m.name;
  }
  return s;
}

std::string to_csv(const MetricsReport& r) {
  std::ostringstream os;
  os << r.n_pixels << std::setprecision(9);
  for (const auto& m : metric_table()) os << ',' << r.*m.field;
  return os.str();
}

void print_table(std::ostream& os, const MetricsReport& r) {
  const auto flags = os.flags();
  os << std::left << std::setw(12) << "n_pixels" << r.n_pixels << '\n';
  for (const auto& m : metric_table()) {
    os << std::setw(12) << m.name << std::fixed << std::setprecision(6)
       << r.*m.field << (m.higher_is_better ? "  (higher is better)" : "")
       << '\n';
  }
  os.flags(flags);
}

}  // namespace dorn
