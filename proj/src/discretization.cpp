#include "dorn/discretization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dorn {

std::string_view to_string(Strategy s) {
  return s == Strategy::kUniform ? "UD" : "SID";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "UD") return Strategy::kUniform;
  if (s == "SID") return Strategy::kSpacingIncreasing;
  throw std::invalid_argument("unknown discretization strategy '" +
                              std::string(s) + "'");
}

DiscretizationScheme DiscretizationScheme::build(Strategy strategy,
                                                 double alpha, double beta,
                                                 int num_bins) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("discretization range must be finite");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("discretization alpha must be >= 0");
  }
  if (!(beta > alpha)) {
    throw std::invalid_argument("discretization requires beta > alpha");
  }
  if (num_bins < 1) {
    throw std::invalid_argument("discretization requires K >= 1");
  }

  DiscretizationScheme s;
  s.strategy_ = strategy;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.xi_ = 1.0 - alpha;

  const double lo = 1.0;
  const double hi = beta + s.xi_;
  const double k = num_bins;
  s.thresholds_.resize(num_bins + 1);
  for (int i = 0; i <= num_bins; ++i) {
    if (strategy == Strategy::kUniform) {
      s.thresholds_[i] = lo + (hi - lo) * i / k;
    } else {
      s.thresholds_[i] = std::exp(std::log(lo) + std::log(hi / lo) * i / k);
    }
  }
  s.thresholds_.front() = lo;
  s.thresholds_.back() = hi;
  for (int i = 0; i < num_bins; ++i) {
    if (!(s.thresholds_[i + 1] > s.thresholds_[i])) {
      throw std::invalid_argument(
          "discretization range too narrow for the requested K");
    }
  }
  return s;
}

int DiscretizationScheme::depth_to_label(double depth) const {
  if (!std::isfinite(depth)) {
    throw std::invalid_argument("depth_to_label: non-finite depth");
  }
  const int k = num_bins();
  const double v = depth + xi_;
  const double lo = thresholds_.front();
  const double hi = thresholds_.back();
  if (v < lo) return 0;
  if (v >= hi) return k - 1;

  double pos;
  if (strategy_ == Strategy::kUniform) {
    pos = (v - lo) / (hi - lo) * k;
  } else {
    pos = std::log(v / lo) / std::log(hi / lo) * k;
  }
  int l = std::clamp(static_cast<int>(std::floor(pos)), 0, k - 1);
  // The closed form can land one bin off at threshold boundaries.
  while (l > 0 && thresholds_[l] > v) --l;
  while (l < k - 1 && thresholds_[l + 1] <= v) ++l;
  return l;
}

double DiscretizationScheme::decode_depth(int label) const {
  const int k = num_bins();
  if (label < 0 || label > k) {
    throw std::invalid_argument("decode_depth: label out of range");
  }
  const int l = std::min(label, k - 1);
  return 0.5 * (thresholds_[l] + thresholds_[l + 1]) - xi_;
}

double DiscretizationScheme::bin_width(int label) const {
  if (label < 0 || label >= num_bins()) {
    throw std::invalid_argument("bin_width: label out of range");
  }
  return thresholds_[label + 1] - thresholds_[label];
}

LabelMap DiscretizationScheme::label_map(const Grid2<double>& depth) const {
  LabelMap labels(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    labels[i] = depth_to_label(depth[i]);
  }
  return labels;
}

std::string DiscretizationScheme::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(strategy_) << ',' << alpha_ << ',' << beta_ << ','
     << num_bins();
  return os.str();
}

namespace {

double parse_real(std::string_view field) {
  std::string s(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("scheme record: bad number '" + s + "'");
  }
  if (used != s.size()) {
    throw std::invalid_argument("scheme record: bad number '" + s + "'");
  }
  return v;
}

}  // namespace

DiscretizationScheme DiscretizationScheme::parse(std::string_view record) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = record.find(',');
    fields.push_back(record.substr(0, comma));
    if (comma == std::string_view::npos) break;
    record.remove_prefix(comma + 1);
  }
  if (fields.size() != 4) {
    throw std::invalid_argument(
        "scheme record must be 'strategy,alpha,beta,K'");
  }
  int k = 0;
  const auto kf = fields[3];
  auto [ptr, ec] = std::from_chars(kf.data(), kf.data() + kf.size(), k);
  if (ec != std::errc{} || ptr != kf.data() + kf.size()) {
    throw std::invalid_argument("scheme record: bad K '" + std::string(kf) +
                                "'");
  }
  return build(parse_strategy(fields[0]), parse_real(fields[1]),
               parse_real(fields[2]), k);
}

}  // namespace dorn
