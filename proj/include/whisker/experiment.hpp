#pragma once

// Experiment drivers behind the command-line verbs: modal sweep, dataset
// synthesis, repeated train/evaluate, speed sweep and gradient check.
// Every driver is a function of an ExperimentConfig; randomness is derived
// from the master seed through derive_seed(master, purpose).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "whisker/beam.hpp"
#include "whisker/errors.hpp"
#include "whisker/features.hpp"
#include "whisker/mlp.hpp"
#include "whisker/seed.hpp"
#include "whisker/terrain.hpp"

namespace whisker {

namespace fs = std::filesystem;
using nlohmann::json;

struct SweepGrid {
  std::vector<double> frequencies_hz = {50, 100, 150, 200, 250, 300, 350};
  std::vector<double> amplitudes_mm = {0.1, 0.2, 0.3, 0.4, 0.5};
  double sample_rate_hz = 2000.0;
  double duration_s = 1.0;
};

struct ExperimentConfig {
  SpringSpec spring;
  double modal_damping = kDefaultModalDamping;
  double sensor_position_m = 5e-3;
  ProfileTable profiles = default_profiles();
  double speed_m_s = 0.2;
  std::vector<double> speeds_m_s = {0.10, 0.15, 0.20, 0.25, 0.30};
  double duration_s = 300.0;
  double window_s = 1.0;
  double sample_rate_hz = 200.0;
  double train_fraction = 0.75;
  std::size_t repetitions = 20;
  MlpArchitecture arch;
  TrainConfig train;  // seed ignored; derived per repetition
  double max_dropped_fraction = 0.01;
  SweepGrid sweep;
  std::uint64_t seed = 2021;
  // Not part of the resolved config embedded in reports.
  std::string output_dir = "out";
  std::string dataset_dir;  // empty: same as output_dir

  BeamSpec beam() const {
    BeamSpec b = spring_to_beam(spring);
    b.modal_damping = modal_damping;
    b.validate();
    return b;
  }

  std::string resolved_dataset_dir() const { return dataset_dir.empty() ? output_dir : dataset_dir; }

  void validate() const {
    spring.validate();
    if (!(modal_damping > 0.0 && modal_damping < 1.0)) {
      throw PhysicsError("config: modal_damping must be in (0, 1)");
    }
    if (!(sensor_position_m >= 0.0 && sensor_position_m <= spring.free_length)) {
      throw PhysicsError("config: sensor_position_m must lie on the beam");
    }
    validate_table(profiles);
    if (!(speed_m_s > 0.0)) throw ConfigError("config: speed_m_s must be > 0");
    for (double v : speeds_m_s) {
      if (!(v > 0.0)) throw ConfigError("config: speeds_m_s entries must be > 0");
    }
    if (!(duration_s > 0.0) || !(window_s > 0.0) || !(sample_rate_hz > 0.0)) {
      throw ConfigError("config: duration_s, window_s and sample_rate_hz must be > 0");
    }
    if (sample_count(sample_rate_hz, window_s) != kFeatureWidth) {
      throw ConfigError("config: window_s * sample_rate_hz must give 200-sample windows");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw ConfigError("config: train_fraction must be in (0, 1)");
    }
    if (repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    arch.validate();
    if (arch.inputs() != kFeatureWidth || arch.outputs() != kTerrainCount) {
      throw ConfigError("config: layer_sizes must start at 200 and end at 7");
    }
    if (!(train.learning_rate >= 0.0) || train.epochs < 1 || train.batch_size < 1) {
      throw ConfigError("config: invalid training parameters");
    }
  }
};

// ---------------------------------------------------------------------------
// Config JSON

inline json config_to_json(const ExperimentConfig& c) {
  return {
      {"spring",
       {{"free_length_m", c.spring.free_length},
        {"wire_radius_m", c.spring.wire_radius},
        {"outer_diameter_m", c.spring.outer_diameter},
        {"inner_diameter_m", c.spring.inner_diameter},
        {"coil_count", c.spring.coil_count},
        {"wire_density_kg_m3", c.spring.wire_density},
        {"shear_modulus_pa", c.spring.shear_modulus}}},
      {"modal_damping", c.modal_damping},
      {"sensor_position_m", c.sensor_position_m},
      {"profiles", profiles_to_json(c.profiles)},
      {"speed_m_s", c.speed_m_s},
      {"speeds_m_s", c.speeds_m_s},
      {"duration_s", c.duration_s},
      {"window_s", c.window_s},
      {"sample_rate_hz", c.sample_rate_hz},
      {"train_fraction", c.train_fraction},
      {"repetitions", c.repetitions},
      {"layer_sizes", c.arch.layer_sizes},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size}}},
      {"max_dropped_fraction", c.max_dropped_fraction},
      {"sweep",
       {{"f_b_hz", c.sweep.frequencies_hz},
        {"h_b_mm", c.sweep.amplitudes_mm},
        {"sample_rate_hz", c.sweep.sample_rate_hz},
        {"duration_s", c.sweep.duration_s}}},
      {"seed", c.seed},
  };
}

/// Missing keys keep their defaults. A relative "profiles_path" resolves
/// against `base_dir`; an inline "profiles" array takes precedence.
inline ExperimentConfig config_from_json(const json& j, const fs::path& base_dir = {}) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (j.contains("spring")) {
      const auto& s = j.at("spring");
      c.spring.free_length = s.value("free_length_m", c.spring.free_length);
      c.spring.wire_radius = s.value("wire_radius_m", c.spring.wire_radius);
      c.spring.outer_diameter = s.value("outer_diameter_m", c.spring.outer_diameter);
      c.spring.inner_diameter = s.value("inner_diameter_m", c.spring.inner_diameter);
      c.spring.coil_count = s.value("coil_count", c.spring.coil_count);
      c.spring.wire_density = s.value("wire_density_kg_m3", c.spring.wire_density);
      c.spring.shear_modulus = s.value("shear_modulus_pa", c.spring.shear_modulus);
    }
    c.modal_damping = j.value("modal_damping", c.modal_damping);
    c.sensor_position_m = j.value("sensor_position_m", c.sensor_position_m);
    if (j.contains("profiles")) {
      c.profiles = profiles_from_json(j.at("profiles"));
    } else if (j.contains("profiles_path")) {
      fs::path p = j.at("profiles_path").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      std::ifstream in(p);
      if (!in) throw ConfigError("config: cannot open profile table '" + p.string() + "'");
      c.profiles = profiles_from_json(json::parse(in));
    }
    c.speed_m_s = j.value("speed_m_s", c.speed_m_s);
    c.speeds_m_s = j.value("speeds_m_s", c.speeds_m_s);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.window_s = j.value("window_s", c.window_s);
    c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.arch.layer_sizes = j.value("layer_sizes", c.arch.layer_sizes);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
    }
    c.max_dropped_fraction = j.value("max_dropped_fraction", c.max_dropped_fraction);
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      c.sweep.frequencies_hz = s.value("f_b_hz", c.sweep.frequencies_hz);
      c.sweep.amplitudes_mm = s.value("h_b_mm", c.sweep.amplitudes_mm);
      c.sweep.sample_rate_hz = s.value("sample_rate_hz", c.sweep.sample_rate_hz);
      c.sweep.duration_s = s.value("duration_s", c.sweep.duration_s);
    }
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.dataset_dir = j.value("dataset_dir", c.dataset_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Helpers

namespace detail {

inline std::string speed_tag(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline std::string dataset_file_name(TerrainClass t) {
  return "terrain_" + std::to_string(terrain_id(t)) + "_" + std::string(terrain_name(t)) + ".csv";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// sweep

struct SweepSummary {
  SweepSurface surface;
  std::size_t cells = 0;
  std::size_t cells_within_one_bin = 0;
  std::size_t columns = 0;                  // one per f_b
  std::size_t amplitude_invariant_columns = 0;
};

inline SweepSummary run_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep.frequencies_hz.empty() || cfg.sweep.amplitudes_mm.empty()) {
    throw ConfigError("sweep: f_b and h_b grids must be nonempty");
  }
  std::vector<double> h_m;
  for (double mm : cfg.sweep.amplitudes_mm) h_m.push_back(mm * 1e-3);
  SweepSummary s;
  s.surface = modal_sweep(cfg.beam(), cfg.sweep.frequencies_hz, h_m, cfg.sensor_position_m,
                          cfg.sweep.sample_rate_hz, cfg.sweep.duration_s);
  const auto& surf = s.surface;
  s.columns = surf.frequencies.size();
  for (std::size_t fi = 0; fi < surf.frequencies.size(); ++fi) {
    bool invariant = true;
    for (std::size_t hi = 0; hi < surf.amplitudes.size(); ++hi) {
      ++s.cells;
      if (std::abs(surf.f_dominant[fi][hi] - surf.frequencies[fi]) <= surf.bin_width) {
        ++s.cells_within_one_bin;
      }
      invariant = invariant && surf.f_dominant[fi][hi] == surf.f_dominant[fi][0];
    }
    if (invariant) ++s.amplitude_invariant_columns;
  }
  return s;
}

inline json cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const SweepSummary s = run_sweep(cfg);
  const fs::path out = cfg.output_dir;
  std::ostringstream csv;
  write_sweep_csv(csv, s.surface);
  detail::write_text(out / "sweep.csv", csv.str());
  json summary = {
      {"config", config_to_json(cfg)},
      {"cells", s.cells},
      {"bin_width_hz", s.surface.bin_width},
      {"cells_f_dom_within_one_bin", s.cells_within_one_bin},
      {"fraction_f_dom_within_one_bin",
       static_cast<double>(s.cells_within_one_bin) / static_cast<double>(s.cells)},
      {"f_b_columns", s.columns},
      {"columns_f_dom_amplitude_invariant", s.amplitude_invariant_columns},
  };
  detail::write_json(out / "sweep_summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// synth

struct TerrainBuild {
  TerrainClass terrain = TerrainClass::kFlat;
  std::uint64_t seed = 0;
  DatasetBuild build;
};

/// One run per terrain at `speed`; seeds derive from "<purpose>/<terrain>".
inline std::vector<TerrainBuild> synthesize_terrains(const ExperimentConfig& cfg, double speed,
                                                     const std::string& purpose) {
  const BeamSpec beam = cfg.beam();
  std::vector<TerrainBuild> out;
  for (TerrainClass t : kAllTerrains) {
    RobotRun run{speed, cfg.duration_s, cfg.sample_rate_hz,
                 derive_seed(cfg.seed, purpose + "/" + std::string(terrain_name(t)))};
    const LabeledRun labeled{synthesize_run(t, run, beam, cfg.sensor_position_m, cfg.profiles), t};
    out.push_back({t, run.seed, build_dataset(std::span<const LabeledRun>(&labeled, 1), cfg.window_s)});
  }
  return out;
}

inline Dataset merge(const std::vector<TerrainBuild>& builds) {
  Dataset ds;
  for (const auto& b : builds) {
    ds.vectors.insert(ds.vectors.end(), b.build.dataset.vectors.begin(), b.build.dataset.vectors.end());
  }
  return ds;
}

inline void check_dropped(const std::vector<TerrainBuild>& builds, double max_fraction) {
  std::size_t total = 0, skipped = 0;
  for (const auto& b : builds) {
    total += b.build.windows_total;
    skipped += b.build.skipped.size();
  }
  if (total > 0 && static_cast<double>(skipped) / static_cast<double>(total) > max_fraction) {
    throw DataError("synth: " + std::to_string(skipped) + " of " + std::to_string(total) +
                    " windows were degenerate");
  }
}

/// Writes one dataset CSV per terrain plus manifest.json (seeds, counts,
/// SHA-256 of each CSV).
inline json cmd_synth(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto builds = synthesize_terrains(cfg, cfg.speed_m_s, "synth/v=" + detail::speed_tag(cfg.speed_m_s));
  const fs::path dir = cfg.output_dir;
  json files = json::array();
  std::size_t total_vectors = 0, total_skipped = 0;
  for (const auto& b : builds) {
    const fs::path path = dir / detail::dataset_file_name(b.terrain);
    std::ostringstream csv;
    write_dataset_csv(csv, b.build.dataset);
    detail::write_text(path, csv.str());
    total_vectors += b.build.dataset.size();
    total_skipped += b.build.skipped.size();
    files.push_back({{"terrain", std::string(terrain_name(b.terrain))},
                     {"label", terrain_id(b.terrain)},
                     {"file", path.filename().string()},
                     {"seed", b.seed},
                     {"windows", b.build.windows_total},
                     {"vectors", b.build.dataset.size()},
                     {"degenerate_windows", b.build.skipped.size()},
                     {"sha256", sha256_file(path.string())}});
  }
  json manifest = {{"config", config_to_json(cfg)},
                   {"files", files},
                   {"total_vectors", total_vectors},
                   {"degenerate_windows", total_skipped}};
  detail::write_json(dir / "manifest.json", manifest);
  check_dropped(builds, cfg.max_dropped_fraction);
  return manifest;
}

inline Dataset load_synth_dataset(const fs::path& dir) {
  Dataset ds;
  for (TerrainClass t : kAllTerrains) {
    const fs::path path = dir / detail::dataset_file_name(t);
    std::ifstream in(path);
    if (!in) throw DataError("dataset file '" + path.string() + "' not found; run synth first");
    Dataset part = read_dataset_csv(in);
    for (const auto& fv : part.vectors) {
      if (fv.label != t) throw DataError("dataset file '" + path.string() + "' holds a foreign label");
    }
    if (part.empty()) throw DataError("dataset file '" + path.string() + "' is empty");
    ds.vectors.insert(ds.vectors.end(), part.vectors.begin(), part.vectors.end());
  }
  return ds;
}

// ---------------------------------------------------------------------------
// train-eval

struct RepetitionResult {
  std::uint64_t split_seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t shuffle_seed = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  ConfusionMatrix confusion;
};

struct TrainEvalReport {
  std::vector<RepetitionResult> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population
  std::vector<double> mean_per_class;
  std::vector<std::vector<double>> mean_confusion;
  std::vector<std::size_t> test_counts;
};

/// Repeats split -> init -> train -> evaluate; each repetition re-randomizes
/// both the split and the initialization.
inline TrainEvalReport run_repetitions(const Dataset& ds, const ExperimentConfig& cfg,
                                       const std::string& purpose) {
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < kTerrainCount; ++c) {
    if (counts[c] < 2) {
      throw DataError("train-eval: class '" + std::string(kTerrainNames[c]) + "' has " +
                      std::to_string(counts[c]) + " vectors; every class needs at least 2");
    }
  }
  TrainEvalReport report;
  report.mean_per_class.assign(kTerrainCount, 0.0);
  report.mean_confusion.assign(kTerrainCount, std::vector<double>(kTerrainCount, 0.0));
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    const std::string tag = purpose + "/rep=" + std::to_string(r);
    RepetitionResult rep;
    rep.split_seed = derive_seed(cfg.seed, tag + "/split");
    rep.init_seed = derive_seed(cfg.seed, tag + "/init");
    rep.shuffle_seed = derive_seed(cfg.seed, tag + "/shuffle");
    auto [train_set, test_set] = split(ds, cfg.train_fraction, rep.split_seed);
    TrainConfig tc = cfg.train;
    tc.seed = rep.shuffle_seed;
    tc.batch_size = std::min(tc.batch_size, train_set.size());
    const MlpModel model = init(cfg.arch, rep.init_seed);
    rep.initial_loss = mean_loss(model, train_set);
    TrainResult trained = train(model, train_set, tc);
    rep.final_loss = trained.loss_history.back();
    rep.confusion = evaluate(trained.model, test_set);
    if (r == 0) {
      for (const auto& row : rep.confusion.counts) {
        report.test_counts.push_back(std::accumulate(row.begin(), row.end(), std::size_t{0}));
      }
    }
    report.runs.push_back(std::move(rep));
  }
  const double n = static_cast<double>(report.runs.size());
  for (const auto& rep : report.runs) {
    report.mean_accuracy += rep.confusion.overall_accuracy / n;
    for (std::size_t c = 0; c < kTerrainCount; ++c) {
      report.mean_per_class[c] += rep.confusion.per_class_accuracy[c] / n;
      for (std::size_t p = 0; p < kTerrainCount; ++p) {
        report.mean_confusion[c][p] += static_cast<double>(rep.confusion.counts[c][p]) / n;
      }
    }
  }
  double var = 0.0;
  for (const auto& rep : report.runs) {
    const double d = rep.confusion.overall_accuracy - report.mean_accuracy;
    var += d * d / n;
  }
  report.std_accuracy = std::sqrt(var);
  return report;
}

inline json report_to_json(const TrainEvalReport& r) {
  json accuracies = json::array(), runs = json::array(), per_class = json::object();
  for (const auto& rep : r.runs) {
    accuracies.push_back(rep.confusion.overall_accuracy);
    runs.push_back({{"split_seed", rep.split_seed},
                    {"init_seed", rep.init_seed},
                    {"shuffle_seed", rep.shuffle_seed},
                    {"initial_loss", rep.initial_loss},
                    {"final_loss", rep.final_loss},
                    {"accuracy", rep.confusion.overall_accuracy},
                    {"confusion", rep.confusion.counts}});
  }
  for (std::size_t c = 0; c < kTerrainCount; ++c) per_class[std::string(kTerrainNames[c])] = r.mean_per_class[c];
  return {{"repetitions", r.runs.size()},
          {"accuracies", accuracies},
          {"mean_accuracy", r.mean_accuracy},
          {"std_accuracy", r.std_accuracy},
          {"mean_per_class_accuracy", per_class},
          {"mean_confusion", r.mean_confusion},
          {"test_counts", r.test_counts},
          {"runs", runs}};
}

inline std::string confusion_table(const TrainEvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "mean confusion (rows: true, cols: predicted)\n" << std::setw(12) << "";
  for (auto name : kTerrainNames) os << std::setw(11) << name;
  os << std::setw(10) << "acc%\n";
  for (std::size_t c = 0; c < kTerrainCount; ++c) {
    os << std::setw(12) << kTerrainNames[c];
    for (double v : r.mean_confusion[c]) os << std::setw(11) << v;
    os << std::setw(9) << 100.0 * r.mean_per_class[c] << '\n';
  }
  os << "overall accuracy: " << std::setprecision(2) << 100.0 * r.mean_accuracy << "% +/- "
     << 100.0 * r.std_accuracy << "% over " << r.runs.size() << " repetitions\n";
  return os.str();
}

inline json cmd_train_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset ds = load_synth_dataset(cfg.resolved_dataset_dir());
  const TrainEvalReport report = run_repetitions(ds, cfg, "train-eval");
  json j = report_to_json(report);
  j["config"] = config_to_json(cfg);
  const fs::path out = cfg.output_dir;
  detail::write_json(out / "train_eval.json", j);
  detail::write_text(out / "train_eval.txt", confusion_table(report));
  return j;
}

// ---------------------------------------------------------------------------
// speed-sweep

struct DominantBinCheck {
  TerrainClass terrain = TerrainClass::kFlat;
  double expected_frequency_hz = 0.0;  // v / lambda of the dominant component
  std::size_t expected_bin = 0;
  std::size_t observed_bin = 0;
};

/// Dominant feature bin of each terrain's noise-free signal at `speed`,
/// next to the bin predicted by f = v / lambda.
inline std::vector<DominantBinCheck> dominant_bins(const ExperimentConfig& cfg, double speed) {
  const BeamSpec beam = cfg.beam();
  std::vector<DominantBinCheck> out;
  for (TerrainClass t : kAllTerrains) {
    SpectralProfile clean = cfg.profiles.at(t);
    clean.noise_floor = 0.0;
    const RobotRun run{speed, cfg.window_s, cfg.sample_rate_hz, 0};
    const TimeSeries ys = synthesize_run(clean, run, beam, cfg.sensor_position_m);
    const FeatureVector fv = make_feature(ys.samples, t, 0);
    const Spectrum spec{{fv.values.begin(), fv.values.end()}, 1.0 / cfg.window_s};
    DominantBinCheck check;
    check.terrain = t;
    check.expected_frequency_hz = speed / clean.dominant_component().wavelength;
    check.expected_bin = static_cast<std::size_t>(std::llround(check.expected_frequency_hz * cfg.window_s));
    check.observed_bin = dominant_bin(spec);
    out.push_back(check);
  }
  return out;
}

struct SpeedRow {
  double speed = 0.0;
  TrainEvalReport report;
  std::vector<DominantBinCheck> bins;
};

inline std::vector<SpeedRow> run_speed_sweep(const ExperimentConfig& cfg) {
  if (cfg.speeds_m_s.size() < 2) throw ConfigError("speed-sweep: needs at least two speeds");
  std::vector<double> speeds = cfg.speeds_m_s;
  std::sort(speeds.begin(), speeds.end());
  std::vector<SpeedRow> rows;
  for (double v : speeds) {
    const std::string purpose = "speed-sweep/v=" + detail::speed_tag(v);
    try {
      const auto builds = synthesize_terrains(cfg, v, purpose + "/synth");
      check_dropped(builds, cfg.max_dropped_fraction);
      rows.push_back({v, run_repetitions(merge(builds), cfg, purpose), dominant_bins(cfg, v)});
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.epoch(), "speed " + detail::speed_tag(v) + " m/s: " + e.what());
    } catch (const PhysicsError& e) {
      throw PhysicsError("speed " + detail::speed_tag(v) + " m/s: " + e.what());
    } catch (const DataError& e) {
      throw DataError("speed " + detail::speed_tag(v) + " m/s: " + e.what());
    }
  }
  return rows;
}

inline bool bins_scale_with_speed(const std::vector<SpeedRow>& rows) {
  for (const auto& row : rows) {
    for (const auto& b : row.bins) {
      if (b.observed_bin != b.expected_bin) return false;
    }
  }
  return true;
}

inline std::string speed_table(const std::vector<SpeedRow>& rows) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << std::setw(8) << "speed";
  for (auto name : kTerrainNames) os << std::setw(11) << name;
  os << std::setw(10) << "mean" << '\n';
  for (const auto& row : rows) {
    os << std::setw(8) << std::setprecision(2) << row.speed << std::setprecision(1);
    for (double a : row.report.mean_per_class) os << std::setw(11) << 100.0 * a;
    os << std::setw(10) << 100.0 * row.report.mean_accuracy << '\n';
  }
  return os.str();
}

inline json cmd_speed_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto rows = run_speed_sweep(cfg);
  json table = json::array();
  for (const auto& row : rows) {
    json per_class = json::array(), bins = json::array();
    for (std::size_t c = 0; c < kTerrainCount; ++c) per_class.push_back(row.report.mean_per_class[c]);
    for (const auto& b : row.bins) {
      bins.push_back({{"terrain", std::string(terrain_name(b.terrain))},
                      {"expected_frequency_hz", b.expected_frequency_hz},
                      {"expected_bin", b.expected_bin},
                      {"observed_bin", b.observed_bin}});
    }
    table.push_back({{"speed_m_s", row.speed},
                     {"overall_accuracy", row.report.mean_accuracy},
                     {"std_accuracy", row.report.std_accuracy},
                     {"per_class_accuracy", per_class},
                     {"dominant_bins", bins}});
  }
  std::vector<std::string> names(kTerrainNames.begin(), kTerrainNames.end());
  json j = {{"config", config_to_json(cfg)},
            {"terrains", names},
            {"rows", table},
            {"dominant_bins_scale_with_speed", bins_scale_with_speed(rows)}};
  const fs::path out = cfg.output_dir;
  detail::write_json(out / "speed_sweep.json", j);
  detail::write_text(out / "speed_sweep.txt", speed_table(rows));
  return j;
}

// ---------------------------------------------------------------------------
// grad-check

/// Gradient check of a freshly initialized default-architecture model on a
/// batch of synthesized feature vectors, `windows_per_terrain` per terrain.
/// With a single window per terrain about half of the last hidden layer is
/// typically inactive, which leaves too few nonzero output-layer gradients.
inline json cmd_grad_check(const ExperimentConfig& cfg, std::size_t per_layer = 50,
                           std::size_t windows_per_terrain = 2) {
  cfg.validate();
  if (windows_per_terrain < 1) throw ConfigError("grad-check: need at least one window per terrain");
  const BeamSpec beam = cfg.beam();
  const auto batch = static_cast<Eigen::Index>(kTerrainCount * windows_per_terrain);
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(kFeatureWidth), batch);
  std::vector<std::size_t> labels;
  for (TerrainClass t : kAllTerrains) {
    const RobotRun run{cfg.speed_m_s, cfg.window_s * static_cast<double>(windows_per_terrain),
                       cfg.sample_rate_hz,
                       derive_seed(cfg.seed, "grad-check/" + std::string(terrain_name(t)))};
    const TimeSeries ys = synthesize_run(t, run, beam, cfg.sensor_position_m, cfg.profiles);
    const auto windows = window(ys, cfg.window_s);
    for (std::size_t w = 0; w < windows_per_terrain; ++w) {
      const FeatureVector fv = make_feature(windows[w], t, w);
      inputs.col(static_cast<Eigen::Index>(labels.size())) =
          Eigen::Map<const Eigen::VectorXd>(fv.values.data(), kFeatureWidth);
      labels.push_back(terrain_index(t));
    }
  }
  const MlpModel model = init(cfg.arch, derive_seed(cfg.seed, "grad-check/init"));
  const GradCheckResult r =
      gradient_check(model, inputs, labels, per_layer, derive_seed(cfg.seed, "grad-check/sample"));
  json layers = json::array();
  for (const auto& l : r.layers) {
    layers.push_back({{"layer", l.layer},
                      {"sampled", l.sampled},
                      {"kink_skips", l.kink_skips},
                      {"resolution_skips", l.resolution_skips},
                      {"max_relative_error", l.max_relative_error}});
  }
  json j = {{"config", config_to_json(cfg)},
            {"batch_size", labels.size()},
            {"per_layer", per_layer},
            {"resolution_floor", r.resolution_floor},
            {"layers", layers},
            {"max_relative_error", r.max_relative_error}};
  detail::write_json(fs::path(cfg.output_dir) / "grad_check.json", j);
  return j;
}

}  // namespace whisker
