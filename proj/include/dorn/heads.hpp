#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <Eigen/Core>

#include "dorn/discretization.hpp"
#include "dorn/grid.hpp"

namespace dorn {

enum class HeadKind : std::uint32_t { kOrdinal = 0, kMultiClass = 1, kRegression = 2 };

std::string_view to_string(HeadKind kind);

/// Number of outputs a head of this kind produces for K bins.
int head_rows(HeadKind kind, int num_bins);

/// Linear map from per-pixel features to head outputs. The last feature
/// channel is the constant 1, so the last weight column is the bias.
class LinearHead {
 public:
  LinearHead() = default;
  /// Zero-initialized head.
  LinearHead(HeadKind kind, int num_bins, int feature_dim);
  LinearHead(HeadKind kind, int num_bins, Eigen::MatrixXd weights);

  HeadKind kind() const { return kind_; }
  int num_bins() const { return num_bins_; }
  int feature_dim() const { return static_cast<int>(weights_.cols()); }
  int outputs() const { return static_cast<int>(weights_.rows()); }

  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& weights() { return weights_; }

  /// outputs(x, y) = weights * features(x, y)
  Volume forward(const Volume& features) const;

  friend bool operator==(const LinearHead& a, const LinearHead& b) {
    return a.kind_ == b.kind_ && a.num_bins_ == b.num_bins_ &&
           a.weights_.rows() == b.weights_.rows() &&
           a.weights_.cols() == b.weights_.cols() && a.weights_ == b.weights_;
  }

 private:
  HeadKind kind_ = HeadKind::kOrdinal;
  int num_bins_ = 0;
  Eigen::MatrixXd weights_;
};

/// Binary record: "ORDH", u32 version, u32 head_kind, u32 K, u32 C_f, then
/// rows x C_f weights row-major as little-endian IEEE-754 doubles.
inline constexpr std::uint32_t kHeadFormatVersion = 1;

void write_head(std::ostream& os, const LinearHead& head);
LinearHead read_head(std::istream& is);
void save_head(const std::filesystem::path& path, const LinearHead& head);
LinearHead load_head(const std::filesystem::path& path);

/// Converts head outputs to depth in meters.
///   Ordinal:    pairwise softmax, threshold count, bin midpoint.
///   MultiClass: argmax bin (lowest index on ties), bin midpoint.
///   Regression: exp(output) - xi (the head predicts log(depth + xi)).
Grid2<double> decode_outputs(const LinearHead& head, const Volume& outputs,
                             const DiscretizationScheme& scheme);

Grid2<double> predict(const LinearHead& head, const Volume& features,
                      const DiscretizationScheme& scheme);

}  // namespace dorn
