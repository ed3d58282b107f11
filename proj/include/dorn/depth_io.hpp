#pragma once

#include <filesystem>

#include "dorn/features.hpp"

namespace dorn {

/// Largest depth a 16-bit PNG can hold at 1/256 m resolution.
inline constexpr double kPng16MaxDepth = 65535.0 / 256.0;

/// 16-bit single-channel PNG, depth_m = raw / 256, raw 0 = invalid.
/// Valid depths are rounded to the nearest 1/256 m; a valid depth that
/// rounds to 0 is stored as raw 1 so it stays valid.
DepthMap read_depth_png16(const std::filesystem::path& path);
void write_depth_png16(const DepthMap& map, const std::filesystem::path& path);

/// Gray image stored as 16-bit PNG, intensity = raw / 65535. 8-bit gray
/// files are accepted on read (raw / 255).
Image read_image_png(const std::filesystem::path& path);
void write_image_png(const Image& image, const std::filesystem::path& path);

/// Single-channel PFM ("Pf"). Rows are stored bottom-up as 32-bit floats;
/// a negative scale means little-endian. Invalid pixels are written as
/// +inf and every non-finite value reads back as invalid.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DepthMap& map, const std::filesystem::path& path);

}  // namespace dorn
