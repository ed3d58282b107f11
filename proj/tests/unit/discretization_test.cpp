#include "dorn/discretization.hpp"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace {

using dorn::DiscretizationScheme;
using dorn::Strategy;
using Hp = boost::multiprecision::cpp_bin_float_50;

// Linear search over the stored thresholds, clamped to the end bins.
int search_label(const DiscretizationScheme& s, double depth) {
  const auto& t = s.thresholds();
  const double shifted = depth + s.shift();
  const int k = s.num_bins();
  if (shifted < t[0]) return 0;
  for (int l = 0; l < k; ++l) {
    if (t[l] <= shifted && shifted < t[l + 1]) return l;
  }
  return k - 1;
}

TEST(Discretization, UniformThresholds) {
  const auto s = DiscretizationScheme::build(Strategy::kUniform, 0, 80, 5);
  EXPECT_DOUBLE_EQ(s.shift(), 1.0);
  const std::vector<double> want = {1, 17, 33, 49, 65, 81};
  ASSERT_EQ(s.thresholds().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_DOUBLE_EQ(s.thresholds()[i], want[i]) << i;
  }
}

TEST(Discretization, SidEndpointsAreExact) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  EXPECT_EQ(s.thresholds().front(), 1.0);
  EXPECT_EQ(s.thresholds().back(), 81.0);
}

TEST(Discretization, SidFirstThresholdMatchesHighPrecision) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  const Hp t1 = boost::multiprecision::exp(boost::multiprecision::log(Hp(81)) /
                                           80);
  EXPECT_NEAR(s.thresholds()[1], t1.convert_to<double>(), 1e-14);
  EXPECT_NEAR(s.thresholds()[1], 1.0565, 1e-4);
}

TEST(Discretization, SidConstantRatio) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  const auto& t = s.thresholds();
  const double r0 = t[1] / t[0];
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    EXPECT_NEAR(t[i + 1] / t[i], r0, 1e-12) << i;
  }
}

TEST(Discretization, NonzeroAlphaShift) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0.5, 10, 4);
  EXPECT_DOUBLE_EQ(s.shift(), 0.5);
  EXPECT_EQ(s.thresholds().front(), 1.0);
  EXPECT_EQ(s.thresholds().back(), 10.5);
}

TEST(Discretization, BuildRejectsBadArguments) {
  EXPECT_THROW(DiscretizationScheme::build(Strategy::kUniform, 0, 0, 5),
               std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::build(Strategy::kUniform, 5, 1, 5),
               std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::build(Strategy::kUniform, -1, 1, 5),
               std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::build(Strategy::kUniform, 0, 80, 0),
               std::invalid_argument);
  EXPECT_THROW(
      DiscretizationScheme::build(Strategy::kUniform, 0, INFINITY, 5),
      std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::build(Strategy::kUniform, NAN, 80, 5),
               std::invalid_argument);
}

TEST(Discretization, LabelExamples) {
  const auto sid =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  const auto ud = DiscretizationScheme::build(Strategy::kUniform, 0, 80, 5);
  EXPECT_EQ(sid.depth_to_label(0.0), 0);
  EXPECT_EQ(ud.depth_to_label(40.0), 2);
  EXPECT_EQ(sid.depth_to_label(2.0), search_label(sid, 2.0));
}

TEST(Discretization, LabelAtThresholdsIsHalfOpen) {
  for (auto strategy : {Strategy::kUniform, Strategy::kSpacingIncreasing}) {
    const auto s = DiscretizationScheme::build(strategy, 0, 80, 80);
    const auto& t = s.thresholds();
    for (int l = 0; l < s.num_bins(); ++l) {
      const double d = t[l] - s.shift();
      EXPECT_EQ(s.depth_to_label(d), search_label(s, d)) << l;
    }
  }
}

TEST(Discretization, ClosedFormAgreesWithSearch) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 90.0);
  for (auto strategy : {Strategy::kUniform, Strategy::kSpacingIncreasing}) {
    for (int k : {1, 2, 5, 80, 120}) {
      const auto s = DiscretizationScheme::build(strategy, 0, 80, k);
      for (int i = 0; i < 2000; ++i) {
        const double d = u(rng);
        ASSERT_EQ(s.depth_to_label(d), search_label(s, d)) << d;
      }
    }
  }
}

TEST(Discretization, OutOfRangeClamps) {
  const auto s = DiscretizationScheme::build(Strategy::kUniform, 0, 80, 5);
  EXPECT_EQ(s.depth_to_label(-3.0), 0);
  EXPECT_EQ(s.depth_to_label(80.0), 4);
  EXPECT_EQ(s.depth_to_label(1e9), 4);
  EXPECT_THROW(s.depth_to_label(NAN), std::invalid_argument);
}

TEST(Discretization, DecodeExamples) {
  const auto ud = DiscretizationScheme::build(Strategy::kUniform, 0, 80, 5);
  EXPECT_DOUBLE_EQ(ud.decode_depth(0), 8.0);
  EXPECT_DOUBLE_EQ(ud.decode_depth(4), 72.0);
  EXPECT_DOUBLE_EQ(ud.decode_depth(5), 72.0);
  EXPECT_THROW(ud.decode_depth(6), std::invalid_argument);
  EXPECT_THROW(ud.decode_depth(-1), std::invalid_argument);

  const auto sid =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  const Hp t1 = boost::multiprecision::exp(boost::multiprecision::log(Hp(81)) /
                                           80);
  const Hp want = (1 + t1) / 2 - 1;
  EXPECT_NEAR(sid.decode_depth(0), want.convert_to<double>(), 1e-14);
}

TEST(Discretization, RoundtripWithinHalfBin) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 80.0);
  for (auto strategy : {Strategy::kUniform, Strategy::kSpacingIncreasing}) {
    for (int k : {1, 5, 80, 120}) {
      const auto s = DiscretizationScheme::build(strategy, 0, 80, k);
      for (int i = 0; i < 2000; ++i) {
        const double d = u(rng);
        const int l = s.depth_to_label(d);
        ASSERT_LE(std::abs(s.decode_depth(l) - d), s.bin_width(l) / 2 + 1e-12);
      }
    }
  }
}

TEST(Discretization, BinWidthShapes) {
  for (int k : {2, 5, 80, 120}) {
    const auto ud = DiscretizationScheme::build(Strategy::kUniform, 0, 80, k);
    const auto sid =
        DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, k);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(ud.bin_width(i), 80.0 / k, 1e-12);
      if (i + 1 < k) EXPECT_LE(sid.bin_width(i), sid.bin_width(i + 1));
    }
    EXPECT_LT(sid.bin_width(0), ud.bin_width(0)) << k;
    EXPECT_GT(sid.bin_width(k - 1), ud.bin_width(k - 1)) << k;
  }
}

TEST(Discretization, LabelsMonotoneInDepth) {
  for (auto strategy : {Strategy::kUniform, Strategy::kSpacingIncreasing}) {
    const auto s = DiscretizationScheme::build(strategy, 0, 80, 80);
    int prev = s.depth_to_label(-1.0);
    for (double d = -1.0; d < 85.0; d += 0.01) {
      const int l = s.depth_to_label(d);
      ASSERT_GE(l, prev) << d;
      prev = l;
    }
  }
}

TEST(Discretization, LabelMapMatchesPointwise) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 20);
  dorn::Grid2<double> depth(3, 2);
  const double values[] = {0.0, 1.5, 7.0, 20.0, 55.0, 79.9};
  for (int i = 0; i < 6; ++i) depth[i] = values[i];
  const auto labels = s.label_map(depth);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(labels[i], s.depth_to_label(values[i]));
}

TEST(Discretization, SerializeRoundtrip) {
  const auto s =
      DiscretizationScheme::build(Strategy::kSpacingIncreasing, 0, 80, 80);
  EXPECT_EQ(s.serialize(), "SID,0,80,80");
  const auto back = DiscretizationScheme::parse(s.serialize());
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.thresholds(), s.thresholds());

  const auto ud = DiscretizationScheme::build(Strategy::kUniform, 0.25, 10, 7);
  EXPECT_EQ(DiscretizationScheme::parse(ud.serialize()).thresholds(),
            ud.thresholds());
  EXPECT_THROW(DiscretizationScheme::parse("XX,0,80,80"),
               std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::parse("SID,0,80"), std::invalid_argument);
  EXPECT_THROW(DiscretizationScheme::parse("SID,0,eighty,80"),
               std::invalid_argument);
}

}  // namespace
