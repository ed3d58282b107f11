#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "dorn/features.hpp"
#include "dorn/grid.hpp"

namespace dorn::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dorn_" + tag + "_" + std::to_string(rd()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline Volume random_volume(std::mt19937_64& rng, int w, int h, int c,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Volume v(w, h, c);
  for (double& x : v.values()) x = u(rng);
  return v;
}

inline Grid2<double> random_grid(std::mt19937_64& rng, int w, int h,
                                 double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Grid2<double> g(w, h);
  for (double& x : g.values()) x = u(rng);
  return g;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace dorn::test
