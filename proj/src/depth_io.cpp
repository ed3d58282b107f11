#include "dorn/depth_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dorn/io_error.hpp"

namespace dorn {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

struct PngError {
  std::jmp_buf jump;
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  std::longjmp(err->jump, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

/// Raw gray samples in row-major order plus their bit depth.
struct GrayPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

GrayPng read_gray_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }

  PngError err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_handler,
                                           png_warning_handler);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  GrayPng out;
  std::vector<png_byte> row;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(err.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path.string() + "': " + err.message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  if (color != PNG_COLOR_TYPE_GRAY ||
      (out.bit_depth != 8 && out.bit_depth != 16) ||
      png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path.string() +
                      "': expected non-interlaced 8- or 16-bit gray PNG");
  }
  const int bytes = out.bit_depth / 8;
  row.resize(static_cast<std::size_t>(out.width) * bytes);
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < out.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * out.width + x;
      out.samples[i] = bytes == 2 ? static_cast<std::uint16_t>(
                                        (row[2 * x] << 8) | row[2 * x + 1])
                                  : row[x];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_gray16_png(const std::filesystem::path& path, int width, int height,
                      const std::vector<std::uint16_t>& samples) {
  if (width < 1 || height < 1) throw IoError("cannot write empty PNG");
  auto file = open_file(path, "wb");
  PngError err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_handler,
                                            png_warning_handler);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 2);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(err.jump)) {
    png_destroy_write_struct(&png, &info);
    throw IoError("'" + path.string() + "': " + err.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto v = samples[static_cast<std::size_t>(y) * width + x];
      row[2 * x] = static_cast<png_byte>(v >> 8);
      row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace

DepthMap read_depth_png16(const std::filesystem::path& path) {
  const GrayPng png = read_gray_png(path);
  if (png.bit_depth != 16) {
    throw FormatError("'" + path.string() + "': depth PNG must be 16-bit");
  }
  DepthMap map(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const auto raw = png.samples[static_cast<std::size_t>(y) * png.width + x];
      if (raw != 0) map.set(x, y, raw / 256.0);
    }
  }
  return map;
}

void write_depth_png16(const DepthMap& map, const std::filesystem::path& path) {
  std::vector<std::uint16_t> raw(static_cast<std::size_t>(map.width()) *
                                 map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_valid(x, y)) continue;
      const double d = map(x, y);
      if (d > kPng16MaxDepth) {
        throw std::invalid_argument("write_depth_png16: depth " +
                                    std::to_string(d) +
                                    " m exceeds the 16-bit range");
      }
      const auto q = static_cast<std::uint16_t>(std::lround(d * 256.0));
      raw[static_cast<std::size_t>(y) * map.width() + x] =
          q == 0 ? std::uint16_t{1} : q;
    }
  }
  write_gray16_png(path, map.width(), map.height(), raw);
}

Image read_image_png(const std::filesystem::path& path) {
  const GrayPng png = read_gray_png(path);
  const double scale = png.bit_depth == 16 ? 65535.0 : 255.0;
  Image image(png.width, png.height);
  for (std::size_t i = 0; i < png.samples.size(); ++i) {
    image[i] = png.samples[i] / scale;
  }
  return image;
}

void write_image_png(const Image& image, const std::filesystem::path& path) {
  std::vector<std::uint16_t> raw(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = image[i];
    if (!std::isfinite(v)) {
      throw std::invalid_argument("write_image_png: non-finite intensity");
    }
    raw[i] = static_cast<std::uint16_t>(
        std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
  }
  write_gray16_png(path, image.width(), image.height(), raw);
}

DepthMap read_pfm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  const auto fail = [&](const std::string& what) {
    return FormatError("'" + path.string() + "': " + what);
  };

  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  if (!(is >> magic) || magic != "Pf") throw fail("bad PFM magic");
  if (!(is >> width >> height) || width < 1 || height < 1) {
    throw fail("bad PFM dimensions");
  }
  if (!(is >> scale) || scale == 0.0 || !std::isfinite(scale)) {
    throw fail("bad PFM scale");
  }
  // Exactly one whitespace byte separates the header from the payload.
  if (!std::isspace(is.get())) throw fail("bad PFM header terminator");
  const bool little = scale < 0.0;

  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> payload(n * 4);
  is.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(is.gcount()) != payload.size()) {
    throw fail("truncated PFM payload");
  }

  DepthMap map(width, height);
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      const unsigned char* b =
          payload.data() + (static_cast<std::size_t>(row) * width + x) * 4;
      const std::uint32_t bits =
          little ? (std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
                    std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24)
                 : (std::uint32_t{b[3]} | std::uint32_t{b[2]} << 8 |
                    std::uint32_t{b[1]} << 16 | std::uint32_t{b[0]} << 24);
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) continue;
      if (v < 0.0f) throw fail("negative depth in PFM");
      map.set(x, y, v);
    }
  }
  return map;
}

void write_pfm(const DepthMap& map, const std::filesystem::path& path) {
  if (map.width() < 1 || map.height() < 1) {
    throw IoError("cannot write empty PFM");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << "Pf\n" << map.width() << ' ' << map.height() << "\n-1\n";
  std::vector<char> row(static_cast<std::size_t>(map.width()) * 4);
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) {
      const float v = map.is_valid(x, y)
                          ? static_cast<float>(map(x, y))
                          : std::numeric_limits<float>::infinity();
      const auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) {
        row[static_cast<std::size_t>(x) * 4 + b] =
            static_cast<char>((bits >> (8 * b)) & 0xff);
      }
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace dorn
