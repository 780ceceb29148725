#pragma once

// Time series -> labeled frequency-domain feature vectors.
// Pipeline per window: segment, standardize (zero mean, unit population
// std), FFT, keep the full two-sided magnitude spectrum scaled by 1/sqrt(N).

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "whisker/beam.hpp"
#include "whisker/errors.hpp"
#include "whisker/fft.hpp"
#include "whisker/terrain.hpp"

namespace whisker {

inline constexpr std::size_t kFeatureWidth = 200;
inline constexpr double kDegenerateStd = 1e-12;

struct FeatureVector {
  std::array<double, kFeatureWidth> values{};
  TerrainClass label = TerrainClass::kFlat;
  std::size_t source_window = 0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Dataset {
  std::vector<FeatureVector> vectors;
  std::uint64_t split_seed = 0;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }

  std::array<std::size_t, kTerrainCount> class_counts() const {
    std::array<std::size_t, kTerrainCount> counts{};
    for (const auto& v : vectors) ++counts[terrain_index(v.label)];
    return counts;
  }
};

/// Non-overlapping windows of round(window_seconds * sample_rate) samples;
/// a trailing partial window is dropped.
inline std::vector<std::vector<double>> window(const TimeSeries& series, double window_seconds) {
  if (!(window_seconds > 0.0)) throw ConfigError("window: window length must be > 0");
  const std::size_t len = sample_count(series.sample_rate, window_seconds);
  if (len == 0) throw ConfigError("window: window shorter than one sample");
  if (series.samples.size() < len) {
    std::ostringstream msg;
    msg << "window: series of " << series.samples.size() << " samples is shorter than one "
        << len << "-sample window";
    throw DataError(msg.str());
  }
  const std::size_t count = series.samples.size() / len;
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const auto first = series.samples.begin() + static_cast<std::ptrdiff_t>(w * len);
    out.emplace_back(first, first + static_cast<std::ptrdiff_t>(len));
  }
  return out;
}

class DegenerateWindowError : public DataError {
 public:
  using DataError::DataError;
};

inline std::vector<double> standardize(std::span<const double> x, double eps = kDegenerateStd) {
  if (x.empty()) throw DataError("standardize: empty window");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > eps)) {
    std::ostringstream msg;
    msg << "standardize: degenerate window (std " << sd << " <= " << eps << ")";
    throw DegenerateWindowError(msg.str());
  }
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return (v - mean) / sd; });
  return out;
}

/// One window through standardize -> FFT magnitude / sqrt(N).
inline FeatureVector make_feature(std::span<const double> raw, TerrainClass label,
                                  std::size_t window_index) {
  if (raw.size() != kFeatureWidth) {
    throw ConfigError("feature windows must hold exactly " + std::to_string(kFeatureWidth) +
                      " samples, got " + std::to_string(raw.size()));
  }
  const auto standardized = standardize(raw);
  const Spectrum spec = fft_magnitude(standardized);
  // Unitary scaling: the feature vector carries the same energy as the
  // standardized window (mean square 1), the input scale He init assumes.
  const double scale = 1.0 / std::sqrt(static_cast<double>(kFeatureWidth));
  FeatureVector fv;
  std::transform(spec.magnitudes.begin(), spec.magnitudes.end(), fv.values.begin(),
                 [scale](double m) { return m * scale; });
  fv.label = label;
  fv.source_window = window_index;
  return fv;
}

struct SkippedWindow {
  std::size_t run = 0;
  std::size_t window = 0;
  std::string reason;
};

struct DatasetBuild {
  Dataset dataset;
  std::size_t windows_total = 0;
  std::vector<SkippedWindow> skipped;

  double skipped_fraction() const {
    return windows_total == 0 ? 0.0
                              : static_cast<double>(skipped.size()) / static_cast<double>(windows_total);
  }
};

struct LabeledRun {
  TimeSeries series;
  TerrainClass label = TerrainClass::kFlat;
};

/// One feature vector per window, runs in order. Degenerate windows are
/// skipped and listed in the result.
inline DatasetBuild build_dataset(std::span<const LabeledRun> runs, double window_seconds = 1.0) {
  if (runs.empty()) throw DataError("build_dataset: no runs");
  DatasetBuild out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto windows = window(runs[r].series, window_seconds);
    out.windows_total += windows.size();
    for (std::size_t w = 0; w < windows.size(); ++w) {
      try {
        out.dataset.vectors.push_back(make_feature(windows[w], runs[r].label, w));
      } catch (const DegenerateWindowError& e) {
        out.skipped.push_back({r, w, e.what()});
      }
    }
  }
  if (out.dataset.empty()) throw DataError("build_dataset: every window was degenerate");
  return out;
}

/// Stratified split: each class is shuffled with the seeded generator and
/// round(train_fraction * n_c) of its vectors (at least one, at most n_c - 1)
/// go to training. Both halves keep the original relative order.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                         std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train_fraction must be in (0, 1)");
  }
  if (ds.empty()) throw DataError("split: empty dataset");

  std::array<std::vector<std::size_t>, kTerrainCount> by_class;
  for (std::size_t i = 0; i < ds.vectors.size(); ++i) {
    by_class[terrain_index(ds.vectors[i].label)].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> to_train(ds.vectors.size(), false);
  for (std::size_t c = 0; c < kTerrainCount; ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw DataError("split: class '" + std::string(kTerrainNames[c]) +
                      "' has fewer than 2 vectors");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t k = 0; k < n_train; ++k) to_train[idx[k]] = true;
  }

  Dataset train, test;
  train.split_seed = test.split_seed = seed;
  for (std::size_t i = 0; i < ds.vectors.size(); ++i) {
    (to_train[i] ? train : test).vectors.push_back(ds.vectors[i]);
  }
  return {std::move(train), std::move(test)};
}

// CSV: f000..f199,label,window_idx. Values use the shortest round-trip
// decimal representation, so write -> read is lossless.
inline void write_dataset_csv(std::ostream& os, const Dataset& ds) {
  for (std::size_t k = 0; k < kFeatureWidth; ++k) {
    os << 'f' << std::setw(3) << std::setfill('0') << k << ',';
  }
  os << "label,window_idx\n";
  std::array<char, 64> buf{};
  for (const auto& fv : ds.vectors) {
    for (double v : fv.values) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      os.write(buf.data(), res.ptr - buf.data());
      os << ',';
    }
    os << terrain_id(fv.label) << ',' << fv.source_window << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("dataset CSV: missing header");
  {
    std::istringstream header(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(header, cell, ',')) ++cols;
    if (cols != kFeatureWidth + 2) {
      throw DataError("dataset CSV: expected " + std::to_string(kFeatureWidth + 2) +
                      " columns, header has " + std::to_string(cols));
    }
  }

  auto parse_double = [](std::string_view cell, std::size_t row) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
      throw DataError("dataset CSV: bad value '" + std::string(cell) + "' on row " +
                      std::to_string(row));
    }
    return v;
  };

  Dataset ds;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto pos = rest.find(',');
      cells.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (cells.size() != kFeatureWidth + 2) {
      throw DataError("dataset CSV: row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " columns");
    }
    FeatureVector fv;
    for (std::size_t k = 0; k < kFeatureWidth; ++k) fv.values[k] = parse_double(cells[k], row);
    const double label = parse_double(cells[kFeatureWidth], row);
    const double widx = parse_double(cells[kFeatureWidth + 1], row);
    if (label != std::floor(label) || widx < 0 || widx != std::floor(widx)) {
      throw DataError("dataset CSV: non-integer label or window index on row " + std::to_string(row));
    }
    fv.label = terrain_from_id(static_cast<int>(label));
    fv.source_window = static_cast<std::size_t>(widx);
    ds.vectors.push_back(fv);
  }
  return ds;
}

}  // namespace whisker
