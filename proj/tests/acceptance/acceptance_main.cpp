// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Criteria may be selected by number on the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dorn/depth_io.hpp"
#include "dorn/discretization.hpp"
#include "dorn/encoder_budget.hpp"
#include "dorn/experiment.hpp"
#include "dorn/heads.hpp"
#include "dorn/metrics.hpp"
#include "dorn/ordinal.hpp"
#include "metrics_oracle.hpp"

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Scratch directory for the synthetic benchmark, removed at exit.
class Workdir {
 public:
  Workdir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("dorn_acceptance_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// 1. Ordinal gradient against central differences of the loss.
Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int k = 10, c = 5, w = 4, h = 4;
  std::uniform_int_distribution<int> label(0, k - 1);
  const double step = 1e-5;
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    dorn::Volume x(w, h, c);
    for (double& v : x.values()) v = u(rng);
    dorn::LabelMap labels(w, h);
    for (int& l : labels.values()) l = label(rng);
    const dorn::PixelMask mask(w, h);
    Eigen::MatrixXd theta(2 * k, c);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = u(rng);
    dorn::LinearHead head(dorn::HeadKind::kOrdinal, k, theta);

    const auto loss = [&](const dorn::LinearHead& hd) {
      return dorn::ordinal_loss(
          dorn::pairwise_probabilities(dorn::OrdinalLogits(hd.forward(x))),
          labels, mask);
    };
    const auto probs =
        dorn::pairwise_probabilities(dorn::OrdinalLogits(head.forward(x)));
    const Eigen::MatrixXd g = dorn::ordinal_gradient(x, probs, labels, mask);
    Eigen::MatrixXd fd(2 * k, c);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      dorn::LinearHead up = head, down = head;
      up.weights()(i) += step;
      down.weights()(i) -= step;
      fd(i) = (loss(up) - loss(down)) / (2 * step);
    }
    worst = std::max(worst, (g - fd).norm() / fd.norm());
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 5.0,
          fmt("max rel err %.3g (< 1e-6), %.2f s (< 5 s)", worst, secs)};
}

// 2. SID endpoints and constant ratio.
Outcome sid_exactness() {
  const auto s = dorn::DiscretizationScheme::build(
      dorn::Strategy::kSpacingIncreasing, 0, 80, 80);
  const auto& t = s.thresholds();
  const double ratio = t[1] / t[0];
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    worst = std::max(worst, std::abs(t[i + 1] / t[i] - ratio));
  }
  const double e0 = std::abs(t.front() - 1.0);
  const double e80 = std::abs(t.back() - 81.0);
  return {e0 <= 1e-12 && e80 <= 1e-12 && worst <= 1e-12,
          fmt("|t0-1| %.3g, |t80-81| %.3g, ratio spread %.3g (<= 1e-12)", e0,
              e80, worst)};
}

// 3. decode(encode(d)) stays within half the containing bin.
Outcome roundtrip() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 80.0);
  std::vector<double> depths(10000);
  for (double& d : depths) d = u(rng);
  std::size_t failures = 0;
  double worst = 0.0;
  for (auto strategy :
       {dorn::Strategy::kUniform, dorn::Strategy::kSpacingIncreasing}) {
    for (int k : {5, 80, 120}) {
      const auto s = dorn::DiscretizationScheme::build(strategy, 0, 80, k);
      for (double d : depths) {
        const int l = s.depth_to_label(d);
        const double err = std::abs(s.decode_depth(l) - d);
        worst = std::max(worst, err / (s.bin_width(l) / 2));
        if (err > s.bin_width(l) / 2) ++failures;
      }
    }
  }
  return {failures == 0,
          fmt("%.0f violations over 60000 checks, worst error %.4f half-bins",
              static_cast<double>(failures), worst)};
}

// 4. Full-image encoder parameter counts.
Outcome parameter_budget() {
  const dorn::EncoderConfig c;
  const auto fc = dorn::params_fc_fashion(c);
  const auto pooled = dorn::params_pooled_encoder(c);
  const double e_fc = std::abs(fc / 753e6 - 1.0);
  const double e_pool = std::abs(pooled / 51e6 - 1.0);
  return {e_fc < 0.02 && e_pool < 0.02,
          fmt("fc %.0f (%.2f%% off 753M), ", static_cast<double>(fc),
              100 * e_fc) +
              fmt("pooled %.0f (%.2f%% off 51M)", static_cast<double>(pooled),
                  100 * e_pool)};
}

// 5. Step configurations: loss strictly increases with |m - l|.
Outcome penalty_monotonicity() {
  const auto t0 = Clock::now();
  const dorn::PixelMask mask(1, 1);
  std::size_t configs = 0;
  bool ok = true;
  for (double q : {0.6, 0.9}) {
    for (int k = 1; k <= 32 && ok; ++k) {
      for (int l = 0; l < k && ok; ++l) {
        // Loss at every m, grouped by distance |m - l|.
        std::vector<double> lo(k + 1, INFINITY), hi(k + 1, -INFINITY);
        for (int m = 0; m <= k; ++m) {
          dorn::Volume p(1, 1, k);
          for (int i = 0; i < k; ++i) p(0, 0, i) = i < m ? q : 1.0 - q;
          const double v = dorn::ordinal_loss(dorn::OrdinalProbabilities(p),
                                              dorn::LabelMap(1, 1, l), mask);
          const int d = std::abs(m - l);
          lo[d] = std::min(lo[d], v);
          hi[d] = std::max(hi[d], v);
          ++configs;
        }
        for (int d = 0; d + 1 <= k && ok; ++d) {
          if (std::isinf(lo[d + 1])) break;
          ok = lo[d + 1] > hi[d];
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 1.0,
          fmt("%.0f configurations, %.3f s (< 1 s)",
              static_cast<double>(configs), secs)};
}

// 7. Metrics against the scalar-loop oracle.
Outcome metrics_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> depth(0.5, 90.0);
  std::bernoulli_distribution hole(0.15);
  const dorn::DepthCap cap{1e-3, 80.0};
  double worst = 0.0, worst_scale = 0.0;
  bool identity_ok = true;
  for (int i = 0; i < 100; ++i) {
    dorn::DepthMap gt(8, 8), pred(8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        if (!hole(rng)) gt.set(x, y, depth(rng));
        pred.set(x, y, depth(rng));
      }
    }
    if (gt.valid_count() == 0) gt.set(0, 0, 10.0);
    const auto r = dorn::evaluate(pred, gt, cap);
    worst = std::max(worst, dorn::test::max_metric_difference(
                                r, dorn::test::oracle_metrics(pred, gt, cap)));

    const auto self = dorn::evaluate(gt, gt, cap);
    identity_ok = identity_ok && self.delta1 == 1 && self.delta2 == 1 &&
                  self.delta3 == 1;
    for (const auto& m : dorn::metric_table()) {
      if (!m.higher_is_better) identity_ok = identity_ok && self.*m.field == 0;
    }

    // Scale within the cap so clamping cannot interfere.
    dorn::DepthMap a(8, 8), b(8, 8);
    const double s = 0.5 + i * 0.01;
    for (int p = 0; p < 64; ++p) {
      const double v = 1.0 + 0.5 * depth(rng) / 2;
      a.set(p % 8, p / 8, v);
      b.set(p % 8, p / 8, s * v);
    }
    const auto ra = dorn::evaluate(a, gt, cap);
    const auto rb = dorn::evaluate(b, gt, cap);
    worst_scale = std::max({worst_scale, std::abs(ra.silog - rb.silog),
                            std::abs(ra.scale_inv - rb.scale_inv)});
  }
  return {worst <= 1e-12 && identity_ok && worst_scale <= 1e-12,
          fmt("oracle diff %.3g, scale diff %.3g (<= 1e-12), pred=gt ",
              worst, worst_scale) +
              (identity_ok ? "exact" : "WRONG")};
}

// 9. Bit-identical file roundtrips with invalid pixels.
Outcome file_roundtrips(const fs::path& dir) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> raw(1, 65535);
  std::uniform_real_distribution<float> real(0.0f, 200.0f);
  std::uniform_int_distribution<int> side(1, 40);
  int png_ok = 0, pfm_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const int w = side(rng), h = side(rng);
    const int pattern = i % 5;
    dorn::DepthMap png(w, h), pfm(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        bool invalid = false;
        switch (pattern) {
          case 0: invalid = false; break;
          case 1: invalid = (x + y) % 2 == 0; break;
          case 2: invalid = y % 3 == 0; break;
          case 3: invalid = rng() % 4 == 0; break;
          case 4: invalid = rng() % 10 != 0; break;
        }
        if (!invalid) {
          png.set(x, y, raw(rng) / 256.0);
          pfm.set(x, y, static_cast<double>(real(rng)));
        }
      }
    }
    dorn::write_depth_png16(png, dir / "map.png");
    dorn::write_pfm(pfm, dir / "map.pfm");
    png_ok += dorn::read_depth_png16(dir / "map.png") == png;
    pfm_ok += dorn::read_pfm(dir / "map.pfm") == pfm;
  }
  return {png_ok == 50 && pfm_ok == 50,
          fmt("PNG16 %.0f/50, PFM %.0f/50 identical", png_ok, pfm_ok)};
}

// Shared synthetic benchmark for the trend criteria.
struct Benchmark {
  dorn::ExperimentConfig config;
  dorn::Split split;
  double setup_seconds = 0.0;
};

Benchmark make_benchmark(const fs::path& dir) {
  const auto t0 = Clock::now();
  Benchmark b;
  b.config.data_dir = dir / "data";
  dorn::generate_dataset(b.config, b.config.data_dir);
  b.split = dorn::split_dataset(dorn::load_dataset(b.config.data_dir),
                                b.config.test_fraction);
  b.setup_seconds = seconds_since(t0);
  return b;
}

// 6. Ablation orderings on delta1.
Outcome ablation_trend(const Benchmark& b) {
  const auto t0 = Clock::now();
  std::vector<dorn::VariantResult> results;
  for (const auto& v : b.config.variants) {
    results.push_back(dorn::run_variant(b.config, v, b.config.num_bins, b.split));
  }
  const double secs = seconds_since(t0) + b.setup_seconds;
  std::ostringstream detail;
  bool ok = secs < 300.0;
  for (const auto& c : dorn::ablation_orderings(results)) {
    ok = ok && c.held;
    detail << c.better << ">=" << c.worse << " " << fmt("%.3f/%.3f", c.better_delta1, c.worse_delta1)
           << (c.held ? "" : " (violated)") << "; ";
  }
  detail << fmt("%.1f s (< 300 s)", secs);
  return {ok, detail.str()};
}

// 8. Interval sweep trend.
Outcome sweep_trend(const Benchmark& b) {
  const auto t0 = Clock::now();
  std::vector<dorn::VariantResult> results;
  for (int k : {2, 40, 60, 80, 100, 120}) {
    results.push_back(dorn::run_variant(b.config, "DORN-SID", k, b.split));
  }
  const double secs = seconds_since(t0) + b.setup_seconds;
  const auto trend = dorn::sweep_trend(results, b.config.sweep_band);
  const auto d1 = [&](int k) {
    for (const auto& r : results) {
      if (r.num_bins == k && r.report) return r.report->delta1;
    }
    return -1.0;
  };
  const bool ok = trend.coarse_worse.value_or(false) && trend.spread &&
                  trend.spread_ok && secs < 600.0;
  return {ok, fmt("delta1 K=2 %.3f < K=80 %.3f, ", d1(2), d1(80)) +
                  fmt("spread %.4f (< %.2f), ", trend.spread.value_or(NAN),
                      b.config.sweep_band) +
                  fmt("%.1f s (< 600 s)", secs)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  Workdir work;
  std::optional<Benchmark> bench;
  const auto benchmark = [&]() -> const Benchmark& {
    if (!bench) bench = make_benchmark(work.path());
    return *bench;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"gradient oracle", gradient_oracle},
          {"SID exactness", sid_exactness},
          {"discretization roundtrip", roundtrip},
          {"encoder parameter budget", parameter_budget},
          {"penalty monotonicity", penalty_monotonicity},
          {"ablation trend", [&] { return ablation_trend(benchmark()); }},
          {"metrics oracle", metrics_oracle},
          {"interval sweep trend", [&] { return sweep_trend(benchmark()); }},
          {"file-format roundtrips",
           [&] { return file_roundtrips(work.path()); }},
      };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!wanted(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << n << "] "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
