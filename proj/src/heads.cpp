#include "dorn/heads.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "dorn/io_error.hpp"
#include "dorn/ordinal.hpp"

namespace dorn {

std::string_view to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kOrdinal:
      return "ordinal";
    case HeadKind::kMultiClass:
      return "multiclass";
    case HeadKind::kRegression:
      return "regression";
  }
  return "unknown";
}

int head_rows(HeadKind kind, int num_bins) {
  switch (kind) {
    case HeadKind::kOrdinal:
      return 2 * num_bins;
    case HeadKind::kMultiClass:
      return num_bins;
    case HeadKind::kRegression:
      return 1;
  }
  throw std::invalid_argument("unknown head kind");
}

namespace {

Eigen::MatrixXd zero_weights(HeadKind kind, int num_bins, int feature_dim) {
  if (num_bins < 0 || feature_dim < 1) {
    throw std::invalid_argument("LinearHead: bad dimensions");
  }
  return Eigen::MatrixXd::Zero(head_rows(kind, num_bins), feature_dim);
}

}  // namespace

LinearHead::LinearHead(HeadKind kind, int num_bins, int feature_dim)
    : LinearHead(kind, num_bins, zero_weights(kind, num_bins, feature_dim)) {}

LinearHead::LinearHead(HeadKind kind, int num_bins, Eigen::MatrixXd weights)
    : kind_(kind), num_bins_(num_bins), weights_(std::move(weights)) {
  if (kind != HeadKind::kRegression && num_bins < 1) {
    throw std::invalid_argument("LinearHead: K must be >= 1");
  }
  if (weights_.cols() < 1) {
    throw std::invalid_argument("LinearHead: feature dimension must be >= 1");
  }
  if (weights_.rows() != head_rows(kind, num_bins)) {
    throw std::invalid_argument("LinearHead: weight rows do not match kind");
  }
}

Volume LinearHead::forward(const Volume& features) const {
  if (features.channels() != feature_dim()) {
    throw std::invalid_argument("LinearHead::forward: feature dimension " +
                                std::to_string(features.channels()) +
                                " != head dimension " +
                                std::to_string(feature_dim()));
  }
  Volume out(features.width(), features.height(), outputs());
  const auto n = static_cast<Eigen::Index>(features.pixel_count());
  // Channel-innermost storage is column-major with one column per pixel.
  const Eigen::Map<const Eigen::MatrixXd> x(features.values().data(),
                                            feature_dim(), n);
  Eigen::Map<Eigen::MatrixXd> y(out.values().data(), outputs(), n);
  y.noalias() = weights_ * x;
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic = {'O', 'R', 'D', 'H'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), b.size());
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), bytes);
  if (!is) throw FormatError("head record truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

void write_head(std::ostream& os, const LinearHead& head) {
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kHeadFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(head.kind()));
  put_u32(os, static_cast<std::uint32_t>(head.num_bins()));
  put_u32(os, static_cast<std::uint32_t>(head.feature_dim()));
  const auto& w = head.weights();
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(os, w(r, c));
  }
  if (!os) throw IoError("failed writing head record");
}

LinearHead read_head(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw FormatError("head record: bad magic");
  const auto version = get_le(is, 4);
  if (version != kHeadFormatVersion) {
    throw FormatError("head record: unsupported version " +
                      std::to_string(version));
  }
  const auto kind_raw = get_le(is, 4);
  if (kind_raw > 2) throw FormatError("head record: bad head kind");
  const auto kind = static_cast<HeadKind>(kind_raw);
  const auto k = static_cast<int>(get_le(is, 4));
  const auto cols = static_cast<int>(get_le(is, 4));
  if (cols < 1 || k < 0 || k > (1 << 20) || cols > (1 << 20)) {
    throw FormatError("head record: bad dimensions");
  }
  if (kind != HeadKind::kRegression && k < 1) {
    throw FormatError("head record: bad dimensions");
  }
  const int rows = head_rows(kind, k);
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      w(r, c) = std::bit_cast<double>(get_le(is, 8));
    }
  }
  return LinearHead(kind, k, std::move(w));
}

void save_head(const std::filesystem::path& path, const LinearHead& head) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_head(os, head);
}

LinearHead load_head(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_head(is);
}

Grid2<double> decode_outputs(const LinearHead& head, const Volume& outputs,
                             const DiscretizationScheme& scheme) {
  if (outputs.channels() != head.outputs()) {
    throw std::invalid_argument("decode_outputs: channel count mismatch");
  }
  if (head.kind() != HeadKind::kRegression &&
      head.num_bins() != scheme.num_bins()) {
    throw std::invalid_argument("decode_outputs: head K != scheme K");
  }
  Grid2<double> depth(outputs.width(), outputs.height());
  switch (head.kind()) {
    case HeadKind::kOrdinal: {
      const auto labels =
          decode_labels(pairwise_probabilities(OrdinalLogits(outputs)));
      for (std::size_t i = 0; i < depth.size(); ++i) {
        depth[i] = scheme.decode_depth(labels[i]);
      }
      break;
    }
    case HeadKind::kMultiClass:
      for (std::size_t i = 0; i < depth.size(); ++i) {
        const auto y = outputs.pixel(i);
        int best = 0;
        for (int j = 1; j < static_cast<int>(y.size()); ++j) {
          if (y[j] > y[best]) best = j;
        }
        depth[i] = scheme.decode_depth(best);
      }
      break;
    case HeadKind::kRegression:
      for (std::size_t i = 0; i < depth.size(); ++i) {
        depth[i] = std::exp(outputs.pixel(i)[0]) - scheme.shift();
      }
      break;
  }
  return depth;
}

Grid2<double> predict(const LinearHead& head, const Volume& features,
                      const DiscretizationScheme& scheme) {
  return decode_outputs(head, head.forward(features), scheme);
}

}  // namespace dorn
