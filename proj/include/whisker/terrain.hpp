#pragma once

// Synthetic terrain excitation. Each terrain is a set of spatial wavelength
// components; driving over it at speed v turns wavelength lambda into a base
// excitation at f_b = v / lambda. Sensor signals are superpositions of the
// beam response to each component, plus white Gaussian noise.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "whisker/beam.hpp"
#include "whisker/errors.hpp"

namespace whisker {

inline constexpr std::size_t kTerrainCount = 7;

enum class TerrainClass : int {
  kFlat = 1,
  kCement = 2,
  kBrick = 3,
  kCarpet = 4,
  kSoftGrass = 5,
  kSand = 6,
  kSoftSoil = 7,
};

inline constexpr std::array<TerrainClass, kTerrainCount> kAllTerrains = {
    TerrainClass::kFlat,      TerrainClass::kCement, TerrainClass::kBrick,
    TerrainClass::kCarpet,    TerrainClass::kSoftGrass, TerrainClass::kSand,
    TerrainClass::kSoftSoil};

inline constexpr std::array<std::string_view, kTerrainCount> kTerrainNames = {
    "flat", "cement", "brick", "carpet", "soft-grass", "sand", "soft-soil"};

constexpr int terrain_id(TerrainClass c) { return static_cast<int>(c); }
constexpr std::size_t terrain_index(TerrainClass c) { return static_cast<std::size_t>(c) - 1; }
constexpr std::string_view terrain_name(TerrainClass c) { return kTerrainNames[terrain_index(c)]; }

inline TerrainClass terrain_from_id(int id) {
  if (id < 1 || id > static_cast<int>(kTerrainCount)) {
    throw DataError("terrain id " + std::to_string(id) + " outside 1..7");
  }
  return static_cast<TerrainClass>(id);
}

inline TerrainClass terrain_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTerrainCount; ++i) {
    if (kTerrainNames[i] == name) return kAllTerrains[i];
  }
  throw ConfigError("unknown terrain name '" + std::string(name) + "'");
}

struct SpectralComponent {
  double wavelength = 0.0;    // lambda, m
  double amplitude = 0.0;     // h, m
  double phase_jitter = 0.0;  // rad; phase drawn uniformly in [-jitter, jitter]

  friend bool operator==(const SpectralComponent&, const SpectralComponent&) = default;
};

struct SpectralProfile {
  std::vector<SpectralComponent> components;
  double noise_floor = 0.0;  // m, std of additive displacement noise

  friend bool operator==(const SpectralProfile&, const SpectralProfile&) = default;

  void validate() const {
    if (components.empty()) throw ConfigError("SpectralProfile: needs at least one component");
    for (const auto& c : components) {
      if (!(c.wavelength > 0.0)) throw ConfigError("SpectralProfile: wavelength must be > 0");
      if (!(c.amplitude >= 0.0)) throw ConfigError("SpectralProfile: amplitude must be >= 0");
      if (!(c.phase_jitter >= 0.0)) throw ConfigError("SpectralProfile: phase jitter must be >= 0");
    }
    if (!(noise_floor >= 0.0)) throw ConfigError("SpectralProfile: noise_floor must be >= 0");
  }

  /// Component with the largest beam response. The response of every
  /// component scales as h * f_b^2 = h * v^2 / lambda^2, so the choice does
  /// not depend on speed.
  const SpectralComponent& dominant_component() const {
    return *std::max_element(components.begin(), components.end(),
                             [](const SpectralComponent& a, const SpectralComponent& b) {
                               return a.amplitude / (a.wavelength * a.wavelength) <
                                      b.amplitude / (b.wavelength * b.wavelength);
                             });
  }
};

using ProfileTable = std::map<TerrainClass, SpectralProfile>;

struct RobotRun {
  double speed = 0.2;          // m/s
  double duration = 300.0;     // s
  double sample_rate = 200.0;  // Hz
  std::uint64_t seed = 0;

  void validate() const {
    if (!(speed > 0.0)) throw ConfigError("RobotRun: speed must be > 0");
    if (!(duration > 0.0)) throw ConfigError("RobotRun: duration must be > 0");
    if (!(sample_rate > 0.0)) throw ConfigError("RobotRun: sample_rate must be > 0");
  }
};

namespace detail {

// Every wavelength is 0.05 m / q for integer q, so at each speed that is a
// multiple of 0.05 m/s (all of 0.10 .. 0.30) every component falls on an
// exact 1 Hz bin. At 0.2 m/s the dominant components sit at
// 4, 12, 20, 28, 36, 48 and 60 Hz; at 0.3 m/s the highest is 90 Hz,
// still below the 100 Hz Nyquist limit of a 200 Hz run.
inline SpectralComponent wave(int q, double amplitude_mm, double jitter) {
  return {0.05 / q, amplitude_mm * 1e-3, jitter};
}

}  // namespace detail

/// Frozen terrain table (version 1). Dominant components are listed first.
inline ProfileTable default_profiles() {
  using detail::wave;
  ProfileTable table;
  // Long smooth undulation, barely any texture.
  table[TerrainClass::kFlat] = {{wave(1, 0.20, 0.3)}, 6.0e-8};
  table[TerrainClass::kCement] = {{wave(3, 0.08, 0.5), wave(8, 0.005, 0.5)}, 2.4e-7};
  // Periodic gaps between bricks plus their second harmonic.
  table[TerrainClass::kBrick] = {{wave(5, 0.10, 0.2), wave(10, 0.010, 0.2)}, 7.0e-7};
  table[TerrainClass::kCarpet] = {{wave(7, 0.04, 1.0), wave(4, 0.04, 1.0)}, 6.0e-7};
  table[TerrainClass::kSoftGrass] = {{wave(9, 0.03, 1.5), wave(2, 0.20, 1.5)}, 7.0e-7};
  // Broadband and noise-heavy.
  table[TerrainClass::kSand] = {
      {wave(12, 0.015, 3.14), wave(6, 0.020, 3.14), wave(14, 0.004, 3.14)}, 1.6e-6};
  table[TerrainClass::kSoftSoil] = {{wave(15, 0.010, 2.0), wave(3, 0.10, 2.0)}, 8.0e-7};
  return table;
}

/// Noise-free, single-tone profiles spaced 8 Hz apart at 0.2 m/s.
inline ProfileTable smoke_profiles() {
  ProfileTable table;
  for (std::size_t i = 0; i < kTerrainCount; ++i) {
    table[kAllTerrains[i]] = {{detail::wave(2 * static_cast<int>(i) + 1, 0.05, 0.5)}, 0.0};
  }
  return table;
}

inline void validate_table(const ProfileTable& table) {
  for (TerrainClass c : kAllTerrains) {
    auto it = table.find(c);
    if (it == table.end()) {
      throw ConfigError("profile table is missing terrain '" + std::string(terrain_name(c)) + "'");
    }
    it->second.validate();
  }
}

/// f_b = v / lambda per component, order preserved. Components at or above
/// the Nyquist frequency of `sample_rate` are rejected.
inline std::vector<Excitation> temporal_components(const SpectralProfile& profile, double speed,
                                                   std::optional<double> sample_rate = {}) {
  if (!(speed > 0.0)) throw ConfigError("temporal_components: speed must be > 0");
  profile.validate();
  std::vector<Excitation> out;
  out.reserve(profile.components.size());
  for (const auto& c : profile.components) {
    const Excitation exc{c.amplitude, speed / c.wavelength};
    if (sample_rate && !(*sample_rate > 2.0 * exc.frequency)) {
      std::ostringstream msg;
      msg << "component lambda = " << c.wavelength << " m at " << speed << " m/s gives f_b = "
          << exc.frequency << " Hz, not below Nyquist for " << *sample_rate << " Hz sampling";
      throw PhysicsError(msg.str());
    }
    out.push_back(exc);
  }
  return out;
}

/// Sensor displacement for one run over one terrain. Sampling starts once the
/// modal transients have settled; each component's phase offset is realized
/// as a time shift of phase / w_b.
inline TimeSeries synthesize_run(const SpectralProfile& profile, const RobotRun& run,
                                 const BeamSpec& beam, double x_s) {
  run.validate();
  const auto excitations = temporal_components(profile, run.speed, run.sample_rate);
  const double t0 = steady_state_start(beam);

  std::mt19937_64 rng(run.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> phases;
  phases.reserve(excitations.size());
  for (const auto& c : profile.components) phases.push_back(unit(rng) * c.phase_jitter);

  TimeSeries out;
  out.sample_rate = run.sample_rate;
  out.start_time = t0;
  out.samples.assign(sample_count(run.sample_rate, run.duration), 0.0);
  for (std::size_t k = 0; k < excitations.size(); ++k) {
    const double shift = phases[k] / excitations[k].angular_frequency();
    const TimeSeries part = displacement_series(beam, excitations[k], x_s, run.sample_rate,
                                                run.duration, t0 + shift);
    for (std::size_t i = 0; i < part.samples.size(); ++i) out.samples[i] += part.samples[i];
  }
  if (profile.noise_floor > 0.0) {
    std::normal_distribution<double> noise(0.0, profile.noise_floor);
    for (double& v : out.samples) v += noise(rng);
  }
  return out;
}

inline TimeSeries synthesize_run(TerrainClass terrain, const RobotRun& run, const BeamSpec& beam,
                                 double x_s, const ProfileTable& table = default_profiles()) {
  auto it = table.find(terrain);
  if (it == table.end()) {
    throw ConfigError("no profile for terrain '" + std::string(terrain_name(terrain)) + "'");
  }
  return synthesize_run(it->second, run, beam, x_s);
}

// JSON form: [{"terrain": name, "components": [{"lambda_m", "h_m", "jitter_rad"}],
//              "noise_floor_m": x}, ...] ordered by terrain id.
inline nlohmann::json profiles_to_json(const ProfileTable& table) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [terrain, profile] : table) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : profile.components) {
      comps.push_back({{"lambda_m", c.wavelength}, {"h_m", c.amplitude}, {"jitter_rad", c.phase_jitter}});
    }
    out.push_back({{"terrain", std::string(terrain_name(terrain))},
                   {"components", comps},
                   {"noise_floor_m", profile.noise_floor}});
  }
  return out;
}

inline ProfileTable profiles_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("profile table JSON must be an array");
  ProfileTable table;
  try {
    for (const auto& entry : j) {
      const TerrainClass terrain = terrain_from_name(entry.at("terrain").get<std::string>());
      SpectralProfile profile;
      for (const auto& c : entry.at("components")) {
        profile.components.push_back({c.at("lambda_m").get<double>(), c.at("h_m").get<double>(),
                                      c.value("jitter_rad", 0.0)});
      }
      profile.noise_floor = entry.value("noise_floor_m", 0.0);
      if (!table.emplace(terrain, std::move(profile)).second) {
        throw ConfigError("duplicate terrain '" + std::string(terrain_name(terrain)) + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile table JSON: ") + e.what());
  }
  validate_table(table);
  return table;
}

}  // namespace whisker
