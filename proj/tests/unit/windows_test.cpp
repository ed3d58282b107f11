#include "dorn/windows.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dorn/features.hpp"
#include "helpers.hpp"

namespace {

using dorn::Grid2;
using dorn::WindowSize;

TEST(Windows, Origins) {
  EXPECT_EQ(dorn::window_origins(10, 10, 5), std::vector<int>({0}));
  EXPECT_EQ(dorn::window_origins(10, 4, 4), std::vector<int>({0, 4, 6}));
  EXPECT_EQ(dorn::window_origins(12, 4, 4), std::vector<int>({0, 4, 8}));
  EXPECT_EQ(dorn::window_origins(12, 6, 3), std::vector<int>({0, 3, 6}));
  EXPECT_THROW(dorn::window_origins(5, 6, 1), std::invalid_argument);
  EXPECT_THROW(dorn::window_origins(5, 3, 0), std::invalid_argument);
  EXPECT_THROW(dorn::window_origins(9, 3, 4), std::invalid_argument);
}

TEST(Windows, EveryPixelCovered) {
  for (int len = 1; len <= 30; ++len) {
    for (int win = 1; win <= len; ++win) {
      for (int stride = 1; stride <= win; ++stride) {
        std::vector<int> hits(len, 0);
        for (int o : dorn::window_origins(len, win, stride)) {
          ASSERT_GE(o, 0);
          ASSERT_LE(o + win, len);
          for (int i = o; i < o + win; ++i) ++hits[i];
        }
        for (int h : hits) ASSERT_GE(h, 1) << len << " " << win << " " << stride;
      }
    }
  }
}

TEST(Windows, SingleWindowMatchesDirectPrediction) {
  std::mt19937_64 rng(67);
  const dorn::Image img = dorn::test::random_grid(rng, 16, 12, 0, 1);
  const auto scheme = dorn::DiscretizationScheme::build(
      dorn::Strategy::kSpacingIncreasing, 0, 80, 10);
  const dorn::LinearHead head(dorn::HeadKind::kOrdinal, 10,
                              Eigen::MatrixXd::Random(20, dorn::kFeatureDim));
  const auto windowed =
      dorn::predict_windows(head, img, scheme, {16, 12}, {8, 6});
  const auto direct = dorn::predict(head, dorn::extract_features(img), scheme);
  EXPECT_EQ(windowed.valid_count(), 16u * 12u);
  EXPECT_EQ(windowed.depth(), direct);
}

TEST(Windows, NonOverlappingIsBlockwise) {
  int calls = 0;
  const auto out = dorn::average_windows(
      8, 6, {4, 3}, {4, 3}, [&](int x0, int y0, int w, int h) {
        ++calls;
        return Grid2<double>(w, h, 10.0 * x0 + y0);
      });
  EXPECT_EQ(calls, 4);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(out(x, y), 10.0 * (x / 4 * 4) + (y / 3 * 3));
    }
  }
}

TEST(Windows, HalfOverlapAverages) {
  const double a = 2.0;
  const double b = 7.0;
  const auto out = dorn::average_windows(
      6, 2, {4, 2}, {2, 2}, [&](int x0, int, int w, int h) {
        return Grid2<double>(w, h, x0 == 0 ? a : b);
      });
  EXPECT_EQ(out(0, 0), a);
  EXPECT_EQ(out(1, 1), a);
  EXPECT_EQ(out(2, 0), (a + b) / 2);
  EXPECT_EQ(out(3, 1), (a + b) / 2);
  EXPECT_EQ(out(4, 0), b);
  EXPECT_EQ(out(5, 1), b);
}

TEST(Windows, PredictorShapeChecked) {
  EXPECT_THROW(dorn::average_windows(4, 4, {2, 2}, {2, 2},
                                     [](int, int, int, int) {
                                       return Grid2<double>(1, 1);
                                     }),
               std::logic_error);
}

}  // namespace
