#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "whisker/terrain.hpp"

using namespace whisker;

namespace {

const BeamSpec kBeam = spring_to_beam(SpringSpec{});
constexpr double kSensor = 5e-3;

double dominant_hz(const TimeSeries& ys) {
  return dominant_frequency(fft_magnitude(ys.samples, ys.sample_rate));
}

}  // namespace

TEST(TerrainClass, IdNameBijection) {
  std::set<std::string_view> names;
  for (TerrainClass c : kAllTerrains) {
    EXPECT_EQ(terrain_from_id(terrain_id(c)), c);
    EXPECT_EQ(terrain_from_name(terrain_name(c)), c);
    names.insert(terrain_name(c));
  }
  EXPECT_EQ(names.size(), kTerrainCount);
  EXPECT_EQ(terrain_name(TerrainClass::kSoftSoil), "soft-soil");
  EXPECT_THROW(terrain_from_id(0), DataError);
  EXPECT_THROW(terrain_from_id(8), DataError);
  EXPECT_THROW(terrain_from_name("asphalt"), ConfigError);
}

TEST(DefaultProfiles, DeterministicAndComplete) {
  const auto a = default_profiles();
  const auto b = default_profiles();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), kTerrainCount);
  EXPECT_NO_THROW(validate_table(a));
  EXPECT_NO_THROW(validate_table(smoke_profiles()));
}

TEST(DefaultProfiles, FlatIsQuieterThanBrick) {
  const auto t = default_profiles();
  EXPECT_LT(t.at(TerrainClass::kFlat).noise_floor, t.at(TerrainClass::kBrick).noise_floor);
}

TEST(DefaultProfiles, DominantFrequenciesSeparatedAtReferenceSpeed) {
  // f = v / lambda of each dominant component at 0.2 m/s, 1 Hz bins.
  const auto table = default_profiles();
  std::vector<double> f;
  for (TerrainClass c : kAllTerrains) f.push_back(0.2 / table.at(c).dominant_component().wavelength);
  const std::vector<double> frozen = {4, 12, 20, 28, 36, 48, 60};
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(f[i], frozen[i], 1e-9);
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      EXPECT_GE(std::abs(std::llround(f[i]) - std::llround(f[j])), 2);
    }
  }
}

TEST(DefaultProfiles, EveryComponentBelowNyquistAtAllSweepSpeeds) {
  for (const auto& [c, profile] : default_profiles()) {
    for (double v : {0.10, 0.15, 0.20, 0.25, 0.30}) {
      EXPECT_NO_THROW(temporal_components(profile, v, 200.0)) << terrain_name(c) << " at " << v;
    }
  }
}

TEST(TemporalComponents, FrequencyIsSpeedOverWavelength) {
  const SpectralProfile p{{{0.05, 1e-4, 0.0}, {0.01, 2e-5, 0.0}}, 0.0};
  const auto slow = temporal_components(p, 0.2);
  ASSERT_EQ(slow.size(), 2u);
  EXPECT_NEAR(slow[0].frequency, 4.0, 1e-12);
  EXPECT_NEAR(slow[1].frequency, 20.0, 1e-12);
  const auto fast = temporal_components(p, 0.4);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(fast[i].frequency, 2.0 * slow[i].frequency, 1e-12);
    EXPECT_EQ(fast[i].amplitude, slow[i].amplitude);
  }
}

TEST(TemporalComponents, RejectsNyquistViolationsAndBadSpeed) {
  const SpectralProfile p{{{0.002, 1e-5, 0.0}}, 0.0};
  EXPECT_THROW(temporal_components(p, 0.2, 200.0), PhysicsError);  // 100 Hz
  EXPECT_NO_THROW(temporal_components(p, 0.2, 201.0));
  EXPECT_THROW(temporal_components(p, 0.0), ConfigError);
  EXPECT_THROW(temporal_components(SpectralProfile{{}, 0.0}, 0.2), ConfigError);
}

TEST(TemporalComponents, BrickPeakShiftsWithSpeed) {
  const auto table = default_profiles();
  const auto& brick = table.at(TerrainClass::kBrick);
  SpectralProfile clean = brick;
  clean.noise_floor = 0.0;
  const double lambda = brick.dominant_component().wavelength;
  const double f20 = dominant_hz(synthesize_run(clean, {0.20, 1.0, 200.0, 1}, kBeam, kSensor));
  const double f25 = dominant_hz(synthesize_run(clean, {0.25, 1.0, 200.0, 1}, kBeam, kSensor));
  EXPECT_DOUBLE_EQ(f20, 20.0);
  EXPECT_NEAR(f25 - f20, 0.05 / lambda, 1e-9);
}

TEST(SynthesizeRun, SameSeedIsBitIdentical) {
  const RobotRun run{0.2, 5.0, 200.0, 99};
  const auto a = synthesize_run(TerrainClass::kSand, run, kBeam, kSensor);
  const auto b = synthesize_run(TerrainClass::kSand, run, kBeam, kSensor);
  EXPECT_EQ(a.samples, b.samples);
  RobotRun other = run;
  other.seed = 100;
  EXPECT_NE(synthesize_run(TerrainClass::kSand, other, kBeam, kSensor).samples, a.samples);
}

TEST(SynthesizeRun, FiveMinutesGiveSixtyThousandSamples) {
  const auto ys = synthesize_run(TerrainClass::kCarpet, RobotRun{0.2, 300.0, 200.0, 1}, kBeam, kSensor);
  EXPECT_EQ(ys.samples.size(), 60000u);
  EXPECT_EQ(ys.samples.size() / 200, 300u);
}

TEST(SynthesizeRun, NoiselessSingleComponentEqualsBeamSeries) {
  const SpectralProfile p{{{0.01, 1e-4, 0.0}}, 0.0};
  const RobotRun run{0.2, 2.0, 200.0, 5};
  const auto ys = synthesize_run(p, run, kBeam, kSensor);
  const auto ref = displacement_series(kBeam, {1e-4, 20.0}, kSensor, 200.0, 2.0, steady_state_start(kBeam));
  ASSERT_EQ(ys.samples.size(), ref.samples.size());
  for (std::size_t i = 0; i < ys.samples.size(); ++i) {
    EXPECT_NEAR(ys.samples[i], ref.samples[i], 1e-12 * std::abs(ref.samples[i]) + 1e-24);
  }
}

TEST(SynthesizeRun, SuperpositionOfComponents) {
  const SpectralComponent c1{0.05, 2e-4, 0.0}, c2{0.01, 1e-4, 0.0}, c3{0.004, 1e-5, 0.0};
  const RobotRun run{0.2, 3.0, 200.0, 8};
  const auto all = synthesize_run(SpectralProfile{{c1, c2, c3}, 0.0}, run, kBeam, kSensor);
  std::vector<double> sum(all.samples.size(), 0.0);
  for (const auto& c : {c1, c2, c3}) {
    const auto part = synthesize_run(SpectralProfile{{c}, 0.0}, run, kBeam, kSensor);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += part.samples[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(all.samples[i], sum[i], 1e-15 * std::abs(sum[i]) + 1e-25);
}

TEST(SynthesizeRun, DominantFrequencyScalesWithSpeed) {
  const SpectralProfile p{{{0.01, 1e-4, 0.4}}, 0.0};
  for (double v : {0.1, 0.2, 0.3, 0.4}) {
    EXPECT_NEAR(dominant_hz(synthesize_run(p, {v, 1.0, 200.0, 3}, kBeam, kSensor)), v / 0.01, 1e-9);
  }
}

TEST(SynthesizeRun, NoiseFloorSetsResidualSpread) {
  SpectralProfile p{{{0.01, 0.0, 0.0}}, 2e-7};
  const auto ys = synthesize_run(p, {0.2, 50.0, 200.0, 12}, kBeam, kSensor);
  double ss = 0.0;
  for (double v : ys.samples) ss += v * v;
  EXPECT_NEAR(std::sqrt(ss / ys.samples.size()), 2e-7, 0.05 * 2e-7);
}

TEST(ProfileJson, RoundTripsAndValidates) {
  const auto table = default_profiles();
  EXPECT_EQ(profiles_from_json(profiles_to_json(table)), table);

  auto j = profiles_to_json(table);
  j.erase(j.begin());
  EXPECT_THROW(profiles_from_json(j), ConfigError);  // flat missing

  j = profiles_to_json(table);
  j[2]["components"][0]["lambda_m"] = -1.0;
  EXPECT_THROW(profiles_from_json(j), ConfigError);

  j = profiles_to_json(table);
  j.push_back(j[0]);
  EXPECT_THROW(profiles_from_json(j), ConfigError);
  EXPECT_THROW(profiles_from_json(nlohmann::json::object()), ConfigError);
}
