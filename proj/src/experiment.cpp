#include "dorn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "dorn/depth_io.hpp"
#include "dorn/io_error.hpp"

namespace dorn {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v +
                      "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v +
                      "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < INT32_MIN || x > INT32_MAX) {
    throw ConfigError("config: '" + key + "' out of range");
  }
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v +
                    "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const char* key, auto field) {
      t[key] = [field](ExperimentConfig& c, const std::string& k,
                       const std::string& v) { field(c) = to_real(k, v); };
    };
    auto integer = [&t](const char* key, auto field) {
      t[key] = [field](ExperimentConfig& c, const std::string& k,
                       const std::string& v) { field(c) = to_int(k, v); };
    };
    real("alpha", [](ExperimentConfig& c) -> double& { return c.alpha; });
    real("beta", [](ExperimentConfig& c) -> double& { return c.beta; });
    integer("K", [](ExperimentConfig& c) -> int& { return c.num_bins; });
    real("base_lr", [](ExperimentConfig& c) -> double& {
      return c.train.optimizer.base_lr;
    });
    real("power",
         [](ExperimentConfig& c) -> double& { return c.train.optimizer.power; });
    real("momentum", [](ExperimentConfig& c) -> double& {
      return c.train.optimizer.momentum;
    });
    real("weight_decay", [](ExperimentConfig& c) -> double& {
      return c.train.optimizer.weight_decay;
    });
    integer("total_iters", [](ExperimentConfig& c) -> int& {
      return c.train.optimizer.total_iters;
    });
    integer("batch_size", [](ExperimentConfig& c) -> int& {
      return c.train.optimizer.batch_size;
    });
    t["seed"] = [](ExperimentConfig& c, const std::string& k,
                   const std::string& v) {
      const long long s = to_integer(k, v);
      if (s < 0) throw ConfigError("config: seed must be >= 0");
      c.train.optimizer.seed = static_cast<std::uint64_t>(s);
    };
    integer("crop_width",
            [](ExperimentConfig& c) -> int& { return c.train.crop_width; });
    integer("crop_height",
            [](ExperimentConfig& c) -> int& { return c.train.crop_height; });
    t["random_flip"] = [](ExperimentConfig& c, const std::string& k,
                          const std::string& v) {
      c.train.random_flip = to_bool(k, v);
    };
    integer("n_images", [](ExperimentConfig& c) -> int& { return c.n_images; });
    integer("width", [](ExperimentConfig& c) -> int& { return c.scene.width; });
    integer("height",
            [](ExperimentConfig& c) -> int& { return c.scene.height; });
    real("depth_min",
         [](ExperimentConfig& c) -> double& { return c.scene.depth_min; });
    real("depth_max",
         [](ExperimentConfig& c) -> double& { return c.scene.depth_max; });
    integer("num_shapes",
            [](ExperimentConfig& c) -> int& { return c.scene.num_shapes; });
    real("noise_sigma",
         [](ExperimentConfig& c) -> double& { return c.scene.noise_sigma; });
    real("sparsity",
         [](ExperimentConfig& c) -> double& { return c.scene.sparsity; });
    real("contrast",
         [](ExperimentConfig& c) -> double& { return c.scene.contrast; });
    real("albedo_spread",
         [](ExperimentConfig& c) -> double& { return c.scene.albedo_spread; });
    real("test_fraction",
         [](ExperimentConfig& c) -> double& { return c.test_fraction; });
    integer("window_width",
            [](ExperimentConfig& c) -> int& { return c.window.width; });
    integer("window_height",
            [](ExperimentConfig& c) -> int& { return c.window.height; });
    integer("stride_x", [](ExperimentConfig& c) -> int& { return c.stride.width; });
    integer("stride_y",
            [](ExperimentConfig& c) -> int& { return c.stride.height; });
    real("cap_min", [](ExperimentConfig& c) -> double& { return c.cap.min; });
    real("cap_max", [](ExperimentConfig& c) -> double& { return c.cap.max; });
    real("sweep_band",
         [](ExperimentConfig& c) -> double& { return c.sweep_band; });
    t["variants"] = [](ExperimentConfig& c, const std::string&,
                       const std::string& v) {
      c.variants = split_list(v);
      for (const auto& name : c.variants) {
        try {
          parse_variant(name);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("config: ") + e.what());
        }
      }
    };
    t["sweep_k"] = [](ExperimentConfig& c, const std::string& k,
                      const std::string& v) {
      c.sweep_k.clear();
      for (const auto& item : split_list(v)) c.sweep_k.push_back(to_int(k, item));
    };
    t["data_dir"] = [](ExperimentConfig& c, const std::string&,
                       const std::string& v) { c.data_dir = v; };
    t["out_dir"] = [](ExperimentConfig& c, const std::string&,
                      const std::string& v) { c.out_dir = v; };
    return t;
  }();
  return table;
}

}  // namespace

TrainConfig ExperimentConfig::train_config(const std::string& variant) const {
  TrainConfig c = train;
  if (const auto it = variant_lr.find(variant); it != variant_lr.end()) {
    c.optimizer.base_lr = it->second;
  }
  return c;
}

WindowSize ExperimentConfig::effective_window() const {
  return {window.width > 0 ? window.width : train.crop_width,
          window.height > 0 ? window.height : train.crop_height};
}

WindowSize ExperimentConfig::effective_stride() const {
  const WindowSize w = effective_window();
  return {stride.width > 0 ? stride.width : std::max(1, w.width / 2),
          stride.height > 0 ? stride.height : std::max(1, w.height / 2)};
}

void ExperimentConfig::validate() const {
  try {
    DiscretizationScheme::build(Strategy::kSpacingIncreasing, alpha, beta,
                                num_bins);
    if (train.optimizer.total_iters != 0) train.optimizer.validate();
    scene.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (n_images < 1) throw ConfigError("config: n_images must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("config: test_fraction must be in (0, 1)");
  }
  if (train.crop_width < 1 || train.crop_height < 1 ||
      train.crop_width > scene.width || train.crop_height > scene.height) {
    throw ConfigError("config: crop must fit inside the scene");
  }
  const WindowSize w = effective_window();
  if (w.width > scene.width || w.height > scene.height || window.width < 0 ||
      window.height < 0 || stride.width < 0 || stride.height < 0 ||
      effective_stride().width > w.width ||
      effective_stride().height > w.height) {
    throw ConfigError("config: bad test window or stride");
  }
  if (!(cap.max > cap.min) || cap.min < 0.0) {
    throw ConfigError("config: need 0 <= cap_min < cap_max");
  }
  if (variants.empty()) throw ConfigError("config: no variants listed");
  for (int k : sweep_k) {
    if (k < 1) throw ConfigError("config: sweep_k entries must be >= 1");
  }
  if (!(sweep_band > 0.0)) throw ConfigError("config: sweep_band must be > 0");
}

void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::string& value) {
  if (key.rfind("lr.", 0) == 0) {
    const std::string variant = key.substr(3);
    try {
      parse_variant(variant);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    const double lr = to_real(key, value);
    if (!(lr >= 0.0)) throw ConfigError("config: '" + key + "' must be >= 0");
    config.variant_lr[variant] = lr;
    return;
  }
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

ExperimentConfig parse_config(std::istream& is, const fs::path& base_dir) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    apply_setting(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  if (!base_dir.empty()) {
    if (config.data_dir.is_relative()) config.data_dir = base_dir / config.data_dir;
    if (config.out_dir.is_relative()) config.out_dir = base_dir / config.out_dir;
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(is, path.parent_path());
}

std::uint64_t scene_seed(std::uint64_t seed, int index) {
  // splitmix64 of (seed, index)
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string sample_stem(int index) {
  std::ostringstream os;
  os << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

std::vector<ManifestEntry> generate_dataset(const ExperimentConfig& config,
                                            const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create dataset directory '" + dir.string() + "'");
  }
  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < config.n_images; ++i) {
    SceneSpec spec = config.scene;
    spec.seed = scene_seed(config.train.optimizer.seed, i);
    const Scene scene = generate_scene(spec);
    const std::string stem = sample_stem(i);
    write_image_png(scene.image, dir / (stem + "_img.png"));
    write_depth_png16(scene.depth, dir / (stem + "_depth.png"));
    manifest.push_back({stem, spec.width, spec.height,
                        scene.depth.valid_count()});
  }
  std::ofstream os(dir / "manifest.csv", std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in '" + dir.string() + "'");
  os << "id,width,height,valid_pixels\n";
  for (const auto& m : manifest) {
    os << m.id << ',' << m.width << ',' << m.height << ',' << m.valid_pixels
       << '\n';
  }
  if (!os) throw IoError("failed writing manifest in '" + dir.string() + "'");
  return manifest;
}

std::vector<ManifestEntry> read_manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.csv");
  if (!is) throw IoError("missing manifest.csv in '" + dir.string() + "'");
  std::string line;
  if (!std::getline(is, line) || trim(line) != "id,width,height,valid_pixels") {
    throw FormatError("'" + dir.string() + "/manifest.csv': bad header");
  }
  std::vector<ManifestEntry> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    ManifestEntry m;
    std::string w, h, n;
    if (!std::getline(ss, m.id, ',') || !std::getline(ss, w, ',') ||
        !std::getline(ss, h, ',') || !std::getline(ss, n)) {
      throw FormatError("manifest.csv: malformed row '" + line + "'");
    }
    try {
      m.width = std::stoi(w);
      m.height = std::stoi(h);
      m.valid_pixels = std::stoull(n);
    } catch (const std::exception&) {
      throw FormatError("manifest.csv: malformed row '" + line + "'");
    }
    out.push_back(m);
  }
  return out;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("dataset directory '" + dir.string() + "' does not exist");
  }
  Dataset data;
  for (const auto& m : read_manifest(dir)) {
    TrainingSample s{read_image_png(dir / (m.id + "_img.png")),
                     read_depth_png16(dir / (m.id + "_depth.png"))};
    if (s.image.width() != m.width || s.image.height() != m.height ||
        s.depth.width() != m.width || s.depth.height() != m.height ||
        s.depth.valid_count() != m.valid_pixels) {
      throw FormatError("sample '" + m.id + "' does not match manifest.csv");
    }
    data.ids.push_back(m.id);
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty()) {
    throw FormatError("dataset '" + dir.string() + "' is empty");
  }
  return data;
}

Split split_dataset(Dataset all, double test_fraction) {
  const auto n = all.samples.size();
  if (n < 2) throw std::invalid_argument("split: need at least two samples");
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  const auto n_train = n - n_test;
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& d = i < n_train ? s.train : s.test;
    d.ids.push_back(std::move(all.ids[i]));
    d.samples.push_back(std::move(all.samples[i]));
  }
  return s;
}

VariantResult run_variant(const ExperimentConfig& config,
                          const std::string& variant_name, int num_bins,
                          const Split& split) {
  const Variant variant = parse_variant(variant_name);
  const auto scheme = DiscretizationScheme::build(
      variant.strategy, config.alpha, config.beta, num_bins);
  VariantResult r;
  r.variant = variant_name;
  r.num_bins = num_bins;
  try {
    r.training = train(split.train.samples, scheme, variant,
                       config.train_config(variant_name));
  } catch (const TrainingDiverged& e) {
    r.error = e.what();
    return r;
  }
  std::vector<MetricsReport> reports;
  for (const auto& sample : split.test.samples) {
    const DepthMap pred =
        predict_windows(r.training.head, sample.image, scheme,
                        config.effective_window(), config.effective_stride());
    reports.push_back(evaluate(pred, sample.depth, config.cap));
  }
  r.report = average_reports(reports);
  return r;
}

std::vector<OrderingCheck> ablation_orderings(
    const std::vector<VariantResult>& results) {
  const auto find = [&](const std::string& name) -> const VariantResult* {
    for (const auto& r : results) {
      if (r.variant == name) return &r;
    }
    return nullptr;
  };
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"DORN-SID", "DORN-UD"},
      {"DORN-SID", "MCC-SID"},
      {"MCC-SID", "MCC-UD"},
      {"DORN-SID", "MSE"}};
  std::vector<OrderingCheck> out;
  for (const auto& [better, worse] : pairs) {
    const VariantResult* a = find(better);
    const VariantResult* b = find(worse);
    if (!a || !b) continue;
    OrderingCheck c{better, worse};
    if (a->report && b->report) {
      c.better_delta1 = a->report->delta1;
      c.worse_delta1 = b->report->delta1;
      c.held = c.better_delta1 >= c.worse_delta1;
    } else {
      c.held = a->report.has_value() && !b->report.has_value();
    }
    out.push_back(c);
  }
  return out;
}

void write_ablation_csv(std::ostream& os,
                        const std::vector<VariantResult>& results) {
  os << "variant,K,status," << csv_header() << '\n';
  for (const auto& r : results) {
    os << r.variant << ',' << r.num_bins << ',';
    if (r.report) {
      os << "ok," << to_csv(*r.report) << '\n';
    } else {
      os << "diverged";
      for (std::size_t i = 0; i <= kMetricCount; ++i) os << ',';
      os << '\n';
    }
  }
}

SweepTrend sweep_trend(const std::vector<VariantResult>& results,
                       double band) {
  SweepTrend t;
  const auto delta1_at = [&](int k) -> std::optional<double> {
    for (const auto& r : results) {
      if (r.num_bins == k) return r.report ? r.report->delta1 : -1.0;
    }
    return std::nullopt;
  };
  const auto coarse = delta1_at(2);
  const auto fine = delta1_at(80);
  if (coarse && fine) t.coarse_worse = *coarse < *fine;

  std::optional<double> lo, hi;
  for (const auto& r : results) {
    if (r.num_bins < 40 || r.num_bins > 120) continue;
    if (!r.report) {
      t.spread_ok = false;
      continue;
    }
    const double d = r.report->delta1;
    lo = lo ? std::min(*lo, d) : d;
    hi = hi ? std::max(*hi, d) : d;
  }
  if (lo && hi) {
    t.spread = *hi - *lo;
    t.spread_ok = t.spread_ok && *t.spread < band;
  }
  return t;
}

void write_sweep_csv(std::ostream& os,
                     const std::vector<VariantResult>& results) {
  os << "K,delta1,rmse\n" << std::setprecision(9);
  for (const auto& r : results) {
    os << r.num_bins << ',';
    if (r.report) {
      os << r.report->delta1 << ',' << r.report->rmse << '\n';
    } else {
      os << ",\n";
    }
  }
}

DepthMap read_depth_file(const fs::path& path) {
  if (path.extension() == ".pfm") return read_pfm(path);
  return read_depth_png16(path);
}

namespace {

bool is_depth_file(const fs::path& p) {
  const std::string name = p.filename().string();
  const auto ends_with = [&](const std::string& suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  return ends_with("_depth.png") || ends_with(".pfm");
}

std::vector<std::string> depth_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_depth_file(entry.path())) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

std::vector<EvalRow> evaluate_directories(const fs::path& pred,
                                          const fs::path& gt, DepthCap cap) {
  const auto pred_files = depth_files(pred);
  const auto gt_files = depth_files(gt);
  for (const auto& f : gt_files) {
    if (!std::binary_search(pred_files.begin(), pred_files.end(), f)) {
      throw IoError("no prediction for ground truth '" + (gt / f).string() +
                    "'");
    }
  }
  for (const auto& f : pred_files) {
    if (!std::binary_search(gt_files.begin(), gt_files.end(), f)) {
      throw IoError("no ground truth for prediction '" + (pred / f).string() +
                    "'");
    }
  }
  if (gt_files.empty()) {
    throw IoError("no depth files in '" + gt.string() + "'");
  }
  std::vector<EvalRow> rows;
  for (const auto& f : gt_files) {
    rows.push_back({f, evaluate(read_depth_file(pred / f),
                                read_depth_file(gt / f), cap)});
  }
  return rows;
}

}  // namespace dorn
