#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "whisker/experiment.hpp"
#include "whisker/mlp.hpp"

using namespace whisker;

namespace {

Eigen::VectorXd random_feature(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(kFeatureWidth));
  for (auto& v : x) v = dist(rng);
  return x;
}

// Two well separated classes: a strong peak in bin 5 or bin 11 over noise.
Dataset toy_two_class(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  Dataset ds;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    FeatureVector fv;
    for (auto& v : fv.values) v = noise(rng);
    const bool second = i % 2 == 1;
    fv.values[second ? 11 : 5] += 20.0;
    fv.label = second ? TerrainClass::kCement : TerrainClass::kFlat;
    fv.source_window = i;
    ds.vectors.push_back(fv);
  }
  return ds;
}

Dataset default_terrain_dataset(double duration_s) {
  ExperimentConfig cfg;
  cfg.duration_s = duration_s;
  return merge(synthesize_terrains(cfg, cfg.speed_m_s, "test"));
}

}  // namespace

TEST(Init, ShapesAndDeterminism) {
  const MlpModel a = init(MlpArchitecture{}, 11);
  const MlpModel b = init(MlpArchitecture{}, 11);
  const MlpModel c = init(MlpArchitecture{}, 12);
  ASSERT_EQ(a.weights.size(), 6u);
  EXPECT_NO_THROW(a.validate());
  // 200*256+256 + 256*128+128 + 128*64+64 + 64*32+32 + 32*16+16 + 16*7+7
  EXPECT_EQ(a.parameter_count(), 95335u);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    EXPECT_EQ(a.weights[l], b.weights[l]);
    EXPECT_TRUE(a.biases[l].isZero(0.0));
  }
  EXPECT_NE(a.weights[0], c.weights[0]);
}

TEST(Init, HeVariance) {
  const MlpModel m = init(MlpArchitecture{}, 3);
  const auto& w = m.weights[0];
  const double mean = w.mean();
  const double var = (w.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var / (2.0 / 200.0), 1.0, 0.2);
}

TEST(Init, RejectsEmptyLayers) {
  EXPECT_THROW(init(MlpArchitecture{{200}}, 1), ConfigError);
  EXPECT_THROW(init(MlpArchitecture{{200, 0, 7}}, 1), ConfigError);
}

TEST(Forward, ProbabilitiesSumToOne) {
  const MlpModel m = init(MlpArchitecture{}, 4);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = random_feature(s);
    const auto p = forward(m, std::span<const double>(x.data(), kFeatureWidth));
    ASSERT_EQ(p.size(), 7u);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(Forward, ZeroWeightsGiveUniformOutput) {
  MlpModel m = init(MlpArchitecture{}, 5);
  for (auto& w : m.weights) w.setZero();
  const Eigen::VectorXd x = random_feature(1);
  for (double p : forward(m, std::span<const double>(x.data(), kFeatureWidth))) {
    EXPECT_NEAR(p, 1.0 / 7.0, 1e-15);
  }
}

TEST(Forward, SoftmaxShiftInvariantAndStable) {
  Eigen::MatrixXd logits(7, 1);
  logits << 1, 2, 3, 4, 5, 6, 7;
  const Eigen::MatrixXd shifted = (logits.array() + 800.0).matrix();
  const Eigen::MatrixXd a = softmax_columns(logits), b = softmax_columns(shifted);
  EXPECT_TRUE(b.allFinite());
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Forward, RejectsNonFiniteAndWrongWidth) {
  const MlpModel m = init(MlpArchitecture{}, 6);
  Eigen::VectorXd x = random_feature(2);
  x[17] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(forward(m, std::span<const double>(x.data(), kFeatureWidth)), DataError);
  x[17] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(forward(m, std::span<const double>(x.data(), kFeatureWidth)), DataError);
  const std::vector<double> narrow(199, 0.0);
  EXPECT_THROW(forward(m, narrow), DataError);
}

TEST(Loss, KnownValues) {
  std::vector<double> onehot(7, 0.0);
  onehot[3] = 1.0;
  EXPECT_DOUBLE_EQ(loss(onehot, 3), 0.0);
  const std::vector<double> uniform(7, 1.0 / 7.0);
  EXPECT_NEAR(loss(uniform, 0), std::log(7.0), 1e-15);
  EXPECT_NEAR(loss(onehot, 0), -std::log(1e-12), 1e-9);
  EXPECT_TRUE(std::isfinite(loss(onehot, 0)));
}

TEST(Gradients, MatchFiniteDifferencesOnOneSample) {
  const MlpModel m = init(MlpArchitecture{}, 7);
  const Eigen::MatrixXd x = random_feature(3);
  const std::vector<std::size_t> y = {4};
  const GradCheckResult r = gradient_check(m, x, y, 10, 99);
  ASSERT_EQ(r.layers.size(), 6u);
  std::size_t compared = 0;
  for (const auto& layer : r.layers) {
    EXPECT_EQ(layer.sampled, 10u) << "layer " << layer.layer;
    EXPECT_LT(layer.max_relative_error, 1e-5) << "layer " << layer.layer;
    compared += layer.sampled;
  }
  EXPECT_GE(compared, 50u);
}

TEST(Gradients, CheckSurvivesSaturatedSoftmax) {
  // Large inputs push p_label far below the 1e-12 loss clamp; the check
  // must still compare against the unclamped cross-entropy.
  const MlpModel m = init(MlpArchitecture{}, 20);
  const Eigen::MatrixXd x = 40.0 * random_feature(7);
  const Eigen::VectorXd p = forward_batch(m, x);
  Eigen::Index lowest = 0;
  p.minCoeff(&lowest);
  ASSERT_LT(p[lowest], 1e-12);
  const std::vector<std::size_t> y = {static_cast<std::size_t>(lowest)};
  const GradCheckResult r = gradient_check(m, x, y, 10, 3);
  for (const auto& layer : r.layers) EXPECT_GT(layer.sampled, 0u);
  EXPECT_LT(r.max_relative_error, 1e-5);
}

TEST(Gradients, ResolutionSkipsExcludeVanishingGradients) {
  // Every hidden unit is dead, so first-layer gradients vanish identically.
  MlpModel m = init(MlpArchitecture{{200, 4, 7}}, 21);
  m.weights[0].setZero();
  m.biases[0].setConstant(-1.0);
  const Eigen::MatrixXd x = random_feature(8);
  const std::vector<std::size_t> y = {0};
  const GradCheckResult r = gradient_check(m, x, y, 5, 4);
  EXPECT_EQ(r.layers[0].sampled, 0u);
  EXPECT_EQ(r.layers[0].resolution_skips, m.weights[0].size() + m.biases[0].size());
  EXPECT_EQ(r.layers[1].sampled, 5u);  // output biases still carry p - onehot
}

TEST(Gradients, MatchFiniteDifferencesOnBatch) {
  const MlpModel m = init(MlpArchitecture{{200, 16, 9, 7}}, 8);
  Eigen::MatrixXd x(200, 5);
  for (Eigen::Index c = 0; c < 5; ++c) x.col(c) = random_feature(10 + c);
  const std::vector<std::size_t> y = {0, 6, 2, 2, 5};
  const GradCheckResult r = gradient_check(m, x, y, 30, 5);
  EXPECT_LT(r.max_relative_error, 1e-5);
}

TEST(Gradients, DuplicatedBatchGivesSameGradient) {
  const MlpModel m = init(MlpArchitecture{}, 9);
  const Eigen::VectorXd x = random_feature(4);
  Eigen::MatrixXd twice(200, 2);
  twice << x, x;
  const std::vector<std::size_t> one = {1}, two = {1, 1};
  const auto g1 = gradients(m, x, one);
  const auto g2 = gradients(m, twice, two);
  for (std::size_t l = 0; l < g1.grads.weights.size(); ++l) {
    EXPECT_LT((g1.grads.weights[l] - g2.grads.weights[l]).cwiseAbs().maxCoeff(),
              1e-14 * (1.0 + g1.grads.weights[l].cwiseAbs().maxCoeff()));
    EXPECT_LT((g1.grads.biases[l] - g2.grads.biases[l]).cwiseAbs().maxCoeff(),
              1e-14 * (1.0 + g1.grads.biases[l].cwiseAbs().maxCoeff()));
  }
  EXPECT_NEAR(g1.mean_loss, g2.mean_loss, 1e-15);
}

TEST(Gradients, VanishWhenTargetProbabilityIsOne) {
  MlpModel m = init(MlpArchitecture{}, 10);
  m.biases.back()[2] = 1e3;
  const Eigen::MatrixXd x = random_feature(5);
  const std::vector<std::size_t> y = {2};
  const auto g = gradients(m, x, y);
  EXPECT_EQ(g.mean_loss, 0.0);
  for (std::size_t l = 0; l < g.grads.weights.size(); ++l) {
    EXPECT_TRUE(g.grads.weights[l].isZero(0.0));
    EXPECT_TRUE(g.grads.biases[l].isZero(0.0));
  }
}

TEST(Gradients, RejectsBadLabels) {
  const MlpModel m = init(MlpArchitecture{}, 11);
  const Eigen::MatrixXd x = random_feature(6);
  const std::vector<std::size_t> bad = {7}, none = {};
  EXPECT_THROW(gradients(m, x, bad), DataError);
  EXPECT_THROW(gradients(m, x, none), DataError);
}

TEST(Train, ZeroLearningRateChangesNothing) {
  const Dataset ds = toy_two_class(20, 1);
  const MlpModel m = init(MlpArchitecture{}, 12);
  const TrainResult r = train(m, ds, TrainConfig{0.0, 5, 8, 3});
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    EXPECT_EQ(r.model.weights[l], m.weights[l]);
    EXPECT_EQ(r.model.biases[l], m.biases[l]);
  }
  ASSERT_EQ(r.loss_history.size(), 5u);
  for (double v : r.loss_history) EXPECT_EQ(v, r.loss_history.front());
  EXPECT_NEAR(r.loss_history.front(), mean_loss(m, ds), 1e-12);
}

TEST(Train, Deterministic) {
  const Dataset ds = toy_two_class(20, 2);
  const MlpModel m = init(MlpArchitecture{}, 13);
  const TrainConfig cfg{0.01, 4, 8, 17};
  const TrainResult a = train(m, ds, cfg), b = train(m, ds, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  for (std::size_t l = 0; l < m.weights.size(); ++l) EXPECT_EQ(a.model.weights[l], b.model.weights[l]);
}

TEST(Train, SeparableTwoClassProblemConverges) {
  const Dataset ds = toy_two_class(50, 3);
  const TrainResult r = train(init(MlpArchitecture{}, 14), ds, TrainConfig{0.01, 200, 32, 4});
  EXPECT_LT(r.loss_history.back(), 0.05);
  EXPECT_DOUBLE_EQ(evaluate(r.model, ds).overall_accuracy, 1.0);
}

TEST(Train, LossFallsOnTerrainData) {
  const Dataset ds = default_terrain_dataset(60.0);
  const MlpModel m = init(MlpArchitecture{}, 15);
  const double initial = mean_loss(m, ds);
  const TrainResult r = train(m, ds, TrainConfig{0.01, 100, 32, 5});
  EXPECT_LT(r.loss_history.back(), 0.2 * initial);
}

TEST(Train, RejectsBadConfig) {
  const Dataset ds = toy_two_class(4, 4);
  const MlpModel m = init(MlpArchitecture{}, 16);
  EXPECT_THROW(train(m, ds, TrainConfig{-0.1, 1, 4, 0}), ConfigError);
  EXPECT_THROW(train(m, ds, TrainConfig{0.01, 0, 4, 0}), ConfigError);
  EXPECT_THROW(train(m, ds, TrainConfig{0.01, 1, 9, 0}), ConfigError);
  EXPECT_THROW(train(m, Dataset{}, TrainConfig{}), DataError);
  EXPECT_THROW(train(init(MlpArchitecture{{200, 8, 5}}, 1), ds, TrainConfig{0.01, 1, 4, 0}), ConfigError);
}

TEST(Train, DivergenceIsReported) {
  Dataset ds = toy_two_class(8, 5);
  for (auto& fv : ds.vectors) fv.values[0] = 1e300;
  try {
    train(init(MlpArchitecture{}, 17), ds, TrainConfig{1e3, 5, 4, 0});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_LT(e.epoch(), 5u);
  }
}

TEST(Evaluate, PerfectPredictorScoresOne) {
  std::vector<std::size_t> truth;
  for (std::size_t i = 0; i < 70; ++i) truth.push_back(i % 7);
  const auto cm = confusion_from_predictions(truth, truth, 7);
  EXPECT_DOUBLE_EQ(cm.overall_accuracy, 1.0);
  for (double a : cm.per_class_accuracy) EXPECT_DOUBLE_EQ(a, 1.0);
  EXPECT_EQ(cm.total(), 70u);
}

TEST(Evaluate, RowSumsEqualClassCounts) {
  const Dataset ds = toy_two_class(15, 6);
  const auto cm = evaluate(init(MlpArchitecture{}, 18), ds);
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < 7; ++c) {
    EXPECT_EQ(std::accumulate(cm.counts[c].begin(), cm.counts[c].end(), std::size_t{0}), counts[c]);
  }
  EXPECT_EQ(cm.total(), ds.size());
}

TEST(Evaluate, UniformRandomGuessingNearChance) {
  const std::size_t n = 7000;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, 6);
  std::vector<std::size_t> truth(n), guess(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = i % 7;
    guess[i] = pick(rng);
  }
  const double p = 1.0 / 7.0;
  const double bound = 2.576 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  EXPECT_NEAR(confusion_from_predictions(truth, guess, 7).overall_accuracy, p, bound);
}

TEST(Evaluate, ArgmaxScaleInvariantAndTieBreaksLow) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(1e-3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(7), q(7);
    for (auto& v : p) v = u(rng);
    const double k = s(rng);
    for (std::size_t i = 0; i < 7; ++i) q[i] = k * p[i];
    EXPECT_EQ(argmax(p), argmax(q));
  }
  EXPECT_EQ(argmax(std::vector<double>{0.2, 0.4, 0.4}), 1u);
}

TEST(ModelJson, RoundTripReproducesForward) {
  const MlpModel m = init(MlpArchitecture{}, 19);
  const MlpModel back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  EXPECT_EQ(back.init_seed, m.init_seed);
  EXPECT_EQ(back.arch.layer_sizes, m.arch.layer_sizes);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Eigen::VectorXd x = random_feature(s);
    const auto a = forward(m, std::span<const double>(x.data(), kFeatureWidth));
    const auto b = forward(back, std::span<const double>(x.data(), kFeatureWidth));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(ModelJson, RejectsMismatchedShapes) {
  auto j = model_to_json(init(MlpArchitecture{{200, 4, 7}}, 1));
  j["arch"]["layer_sizes"] = {200, 5, 7};
  EXPECT_THROW(model_from_json(j), ConfigError);
  EXPECT_THROW(model_from_json(nlohmann::json::object()), ConfigError);
}
