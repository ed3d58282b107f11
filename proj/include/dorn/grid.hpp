#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dorn {

/// Dense row-major 2D grid. Pixel (x, y) lives at y * width + x.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw std::invalid_argument("Grid2: negative dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(int width, int height) const {
    return width_ == width && height_ == height;
  }
  template <typename U>
  bool same_shape(const Grid2<U>& other) const {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// W x H x C volume of doubles, channel-innermost so each pixel is a
/// contiguous span.
class Volume {
 public:
  Volume() = default;
  Volume(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 0) {
      throw std::invalid_argument("Volume: negative dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::span<double> pixel(int x, int y) {
    return {data_.data() + offset(x, y), static_cast<std::size_t>(channels_)};
  }
  std::span<const double> pixel(int x, int y) const {
    return {data_.data() + offset(x, y), static_cast<std::size_t>(channels_)};
  }
  /// Pixel by flat index (y * width + x).
  std::span<double> pixel(std::size_t i) {
    return {data_.data() + i * channels_, static_cast<std::size_t>(channels_)};
  }
  std::span<const double> pixel(std::size_t i) const {
    return {data_.data() + i * channels_, static_cast<std::size_t>(channels_)};
  }

  double& operator()(int x, int y, int c) { return data_[offset(x, y) + c]; }
  double operator()(int x, int y, int c) const {
    return data_[offset(x, y) + c];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Validity mask over a W x H grid with its count of valid pixels cached.
class PixelMask {
 public:
  PixelMask() = default;
  /// All pixels valid.
  PixelMask(int width, int height) : valid_(width, height, 1) {
    count_ = valid_.size();
  }
  explicit PixelMask(Grid2<std::uint8_t> valid) : valid_(std::move(valid)) {
    count_ = 0;
    for (auto& v : valid_.values()) {
      v = v ? 1 : 0;
      count_ += v;
    }
  }

  int width() const { return valid_.width(); }
  int height() const { return valid_.height(); }
  std::size_t count() const { return count_; }
  bool operator()(int x, int y) const { return valid_(x, y) != 0; }
  bool operator[](std::size_t i) const { return valid_[i] != 0; }
  const Grid2<std::uint8_t>& grid() const { return valid_; }

  void set(int x, int y, bool v) {
    auto& cell = valid_(x, y);
    if (cell && !v) --count_;
    if (!cell && v) ++count_;
    cell = v ? 1 : 0;
  }

 private:
  Grid2<std::uint8_t> valid_;
  std::size_t count_ = 0;
};

}  // namespace dorn
