#pragma once

// Fully connected classifier: ReLU hidden layers, softmax output,
// cross-entropy loss, mini-batch SGD.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "whisker/errors.hpp"
#include "whisker/features.hpp"

namespace whisker {

inline constexpr double kProbabilityFloor = 1e-12;

struct MlpArchitecture {
  // Input, five ReLU hidden layers, softmax output.
  std::vector<std::size_t> layer_sizes = {kFeatureWidth, 256, 128, 64, 32, 16, kTerrainCount};

  std::size_t inputs() const { return layer_sizes.front(); }
  std::size_t outputs() const { return layer_sizes.back(); }
  std::size_t weight_layers() const { return layer_sizes.size() - 1; }

  void validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("MlpArchitecture: need at least input and output layers");
    for (auto s : layer_sizes) {
      if (s < 1) throw ConfigError("MlpArchitecture: every layer needs at least one unit");
    }
  }
};

struct MlpModel {
  MlpArchitecture arch;
  std::vector<Eigen::MatrixXd> weights;  // [layer](out, in)
  std::vector<Eigen::VectorXd> biases;   // [layer](out)
  std::uint64_t init_seed = 0;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  void validate() const {
    arch.validate();
    if (weights.size() != arch.weight_layers() || biases.size() != arch.weight_layers()) {
      throw ConfigError("MlpModel: layer count does not match architecture");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(arch.layer_sizes[l]);
      const auto out = static_cast<Eigen::Index>(arch.layer_sizes[l + 1]);
      if (weights[l].rows() != out || weights[l].cols() != in || biases[l].size() != out) {
        throw ConfigError("MlpModel: parameter shapes do not chain with layer_sizes");
      }
      if (!weights[l].allFinite() || !biases[l].allFinite()) {
        throw ConfigError("MlpModel: non-finite parameters in layer " + std::to_string(l));
      }
    }
  }
};

/// He-normal weights (variance 2 / fan_in), zero biases.
inline MlpModel init(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  MlpModel model;
  model.arch = arch;
  model.init_seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(arch.layer_sizes[l]);
    const auto out = static_cast<Eigen::Index>(arch.layer_sizes[l + 1]);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(in)));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) w(i, j) = dist(rng);
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  return model;
}

/// Column-wise softmax with the column max subtracted first.
inline Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - m).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

/// Pre-activations of every layer for a batch (one sample per column).
struct ForwardPass {
  std::vector<Eigen::MatrixXd> pre;  // z_l
  Eigen::MatrixXd probs;
};

inline ForwardPass forward_pass(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != static_cast<Eigen::Index>(model.arch.inputs())) {
    throw DataError("forward: input width " + std::to_string(inputs.rows()) + " != " +
                    std::to_string(model.arch.inputs()));
  }
  ForwardPass fp;
  const std::size_t layers = model.weights.size();
  fp.pre.reserve(layers);
  Eigen::MatrixXd act = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = model.weights[l] * act;
    z.colwise() += model.biases[l];
    if (l + 1 < layers) act = z.cwiseMax(0.0);
    fp.pre.push_back(std::move(z));
  }
  fp.probs = softmax_columns(fp.pre.back());
  return fp;
}

inline Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (!inputs.allFinite()) throw DataError("forward: non-finite input");
  return forward_pass(model, inputs).probs;
}

inline std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  const Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd p = forward_batch(model, col);
  return {p.data(), p.data() + p.size()};
}

/// Cross-entropy -ln p_label with p clamped below at 1e-12.
inline double loss(std::span<const double> probs, std::size_t label) {
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct BatchGradients {
  Gradients grads;
  double mean_loss = 0.0;
  std::vector<double> sample_losses;
};

/// Mean loss gradient over the batch. Labels are 0-based output indices.
inline BatchGradients gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                std::span<const std::size_t> labels) {
  const auto batch = inputs.cols();
  if (batch == 0) throw DataError("gradients: empty batch");
  if (static_cast<std::size_t>(batch) != labels.size()) {
    throw DataError("gradients: label count does not match batch");
  }
  const ForwardPass fp = forward_pass(model, inputs);
  const std::size_t layers = model.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    if (!fp.pre[l].allFinite()) {
      throw DivergenceError(0, "gradients: non-finite pre-activations in layer " + std::to_string(l));
    }
  }

  BatchGradients out;
  out.sample_losses.resize(labels.size());
  Eigen::MatrixXd delta = fp.probs;  // dL/dz for the output layer: p - onehot
  for (Eigen::Index c = 0; c < batch; ++c) {
    if (labels[c] >= model.arch.outputs()) throw DataError("gradients: label out of range");
    const auto y = static_cast<Eigen::Index>(labels[c]);
    out.sample_losses[c] = -std::log(std::max(fp.probs(y, c), kProbabilityFloor));
    delta(y, c) -= 1.0;
  }
  out.mean_loss = std::accumulate(out.sample_losses.begin(), out.sample_losses.end(), 0.0) /
                  static_cast<double>(batch);
  delta /= static_cast<double>(batch);

  out.grads.weights.resize(layers);
  out.grads.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    if (l == 0) {
      out.grads.weights[l].noalias() = delta * inputs.transpose();
    } else {
      out.grads.weights[l].noalias() = delta * fp.pre[l - 1].cwiseMax(0.0).transpose();
    }
    out.grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = model.weights[l].transpose() * delta;
      delta = (fp.pre[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return out;
}

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 300;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  void validate(std::size_t train_size) const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("TrainConfig: learning_rate must be finite and >= 0");
    }
    if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1 || batch_size > train_size) {
      throw ConfigError("TrainConfig: batch_size must be in [1, train size]");
    }
  }
};

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // mean training loss per epoch
};

namespace detail {

inline Eigen::MatrixXd feature_matrix(const Dataset& ds) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kFeatureWidth), static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(ds.vectors[i].values.data(), kFeatureWidth);
  }
  return x;
}

inline std::vector<std::size_t> label_indices(const Dataset& ds) {
  std::vector<std::size_t> y(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) y[i] = terrain_index(ds.vectors[i].label);
  return y;
}

}  // namespace detail

/// Mean cross-entropy of the model over a dataset.
inline double mean_loss(const MlpModel& model, const Dataset& ds) {
  const Eigen::MatrixXd probs = forward_batch(model, detail::feature_matrix(ds));
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    total -= std::log(std::max(probs(static_cast<Eigen::Index>(terrain_index(ds.vectors[i].label)),
                                     static_cast<Eigen::Index>(i)),
                               kProbabilityFloor));
  }
  return total / static_cast<double>(ds.size());
}

/// Plain mini-batch SGD. The batch order is reshuffled every epoch from a
/// generator seeded with cfg.seed; the last batch of an epoch may be short.
/// Each epoch's loss is the mean of the per-sample losses seen during that
/// epoch, summed in dataset order.
inline TrainResult train(MlpModel model, const Dataset& train_set, const TrainConfig& cfg) {
  if (train_set.empty()) throw DataError("train: empty training set");
  cfg.validate(train_set.size());
  model.validate();
  if (model.arch.inputs() != kFeatureWidth || model.arch.outputs() != kTerrainCount) {
    throw ConfigError("train: architecture must map 200 features to 7 classes");
  }

  const Eigen::MatrixXd x = detail::feature_matrix(train_set);
  const std::vector<std::size_t> y = detail::label_indices(train_set);
  const std::size_t n = train_set.size();

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> per_sample(n);

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);
  Eigen::MatrixXd batch_x(x.rows(), static_cast<Eigen::Index>(cfg.batch_size));
  std::vector<std::size_t> batch_y;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      batch_x.resize(x.rows(), static_cast<Eigen::Index>(len));
      batch_y.resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        batch_x.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(order[start + k]));
        batch_y[k] = y[order[start + k]];
      }
      BatchGradients g;
      try {
        g = gradients(model, batch_x, batch_y);
      } catch (const DivergenceError& e) {
        throw DivergenceError(epoch, "train: epoch " + std::to_string(epoch) + ": " + e.what());
      }
      for (std::size_t k = 0; k < len; ++k) per_sample[order[start + k]] = g.sample_losses[k];
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l].noalias() -= cfg.learning_rate * g.grads.weights[l];
        model.biases[l].noalias() -= cfg.learning_rate * g.grads.biases[l];
      }
    }
    const double epoch_loss =
        std::accumulate(per_sample.begin(), per_sample.end(), 0.0) / static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError(epoch, "train: loss diverged at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(epoch_loss);
  }
  result.model = std::move(model);
  return result;
}

struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]
  std::vector<double> per_class_accuracy;        // 0 for classes absent from the test set
  double overall_accuracy = 0.0;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
  }
};

/// Index of the largest probability; the lowest index wins ties.
inline std::size_t argmax(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

inline ConfusionMatrix confusion_from_predictions(std::span<const std::size_t> truth,
                                                  std::span<const std::size_t> predicted,
                                                  std::size_t classes) {
  ConfusionMatrix cm;
  cm.counts.assign(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[truth[i]][predicted[i]];
  std::size_t diag = 0;
  cm.per_class_accuracy.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto row = std::accumulate(cm.counts[c].begin(), cm.counts[c].end(), std::size_t{0});
    diag += cm.counts[c][c];
    if (row > 0) cm.per_class_accuracy[c] = static_cast<double>(cm.counts[c][c]) / static_cast<double>(row);
  }
  cm.overall_accuracy = truth.empty() ? 0.0 : static_cast<double>(diag) / static_cast<double>(truth.size());
  return cm;
}

inline ConfusionMatrix evaluate(const MlpModel& model, const Dataset& test) {
  if (test.empty()) throw DataError("evaluate: empty test set");
  const Eigen::MatrixXd probs = forward_batch(model, detail::feature_matrix(test));
  const auto truth = detail::label_indices(test);
  std::vector<std::size_t> predicted(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Eigen::VectorXd col = probs.col(static_cast<Eigen::Index>(i));
    predicted[i] = argmax(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  }
  return confusion_from_predictions(truth, predicted, model.arch.outputs());
}

// Gradient check against central finite differences.

struct GradCheckLayer {
  std::size_t layer = 0;
  std::size_t sampled = 0;
  std::size_t kink_skips = 0;
  std::size_t resolution_skips = 0;
  double max_relative_error = 0.0;
};

struct GradCheckResult {
  std::vector<GradCheckLayer> layers;
  double max_relative_error = 0.0;
  double resolution_floor = 0.0;  // smallest gradient magnitude that was compared
};

/// |a - n| / max(|a|, |n|); zero when both vanish.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale == 0.0 ? 0.0 : std::abs(analytic - numeric) / scale;
}

namespace detail {

inline double& parameter_ref(MlpModel& m, std::size_t layer, std::size_t flat) {
  const auto wsize = static_cast<std::size_t>(m.weights[layer].size());
  if (flat < wsize) return m.weights[layer].data()[flat];
  return m.biases[layer].data()[flat - wsize];
}

inline double gradient_ref(const Gradients& g, std::size_t layer, std::size_t flat) {
  const auto wsize = static_cast<std::size_t>(g.weights[layer].size());
  if (flat < wsize) return g.weights[layer].data()[flat];
  return g.biases[layer].data()[flat - wsize];
}

// logsumexp(z) - z_label, exact for arbitrarily small p_label.
template <typename Vec>
auto log_softmax_loss(const Vec& logits, std::size_t label) {
  const auto m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum()) - logits[static_cast<Eigen::Index>(label)];
}

// Extended-precision copy of a model used as the finite-difference oracle.
// Backprop differentiates the unclamped cross-entropy, so the probes do too;
// the clamp in loss() would flatten samples with p_label < 1e-12.
class ProbeNet {
 public:
  using Real = long double;
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  ProbeNet(const MlpModel& model, const Eigen::MatrixXd& inputs, std::span<const std::size_t> labels)
      : labels_(labels.begin(), labels.end()) {
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      w_.push_back(model.weights[l].cast<Real>());
      b_.push_back(model.biases[l].cast<Real>());
    }
    act_.push_back(inputs.cast<Real>());
    for (std::size_t l = 0; l < w_.size(); ++l) {
      Mat z = w_[l] * act_[l];
      z.colwise() += b_[l];
      if (l + 1 < w_.size()) {
        offsets_.push_back(pattern_.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) pattern_.push_back(z.data()[i] > 0);
        act_.push_back(z.cwiseMax(Real(0)));
      }
      pre_.push_back(std::move(z));
    }
    offsets_.push_back(pattern_.size());
    base_loss_ = head_loss(pre_.back());
  }

  Real base_loss() const { return base_loss_; }

  // Mean loss with one parameter shifted by `delta`. Only row i of z_layer
  // moves, so layers below are reused from the base pass. Returns nothing
  // when the shift flips the sign of any hidden pre-activation.
  std::optional<Real> shifted_loss(std::size_t layer, std::size_t flat, Real delta) const {
    Mat z = pre_[layer];
    const auto rows = static_cast<std::size_t>(w_[layer].rows());
    const auto wsize = static_cast<std::size_t>(w_[layer].size());
    if (flat < wsize) {
      const auto i = static_cast<Eigen::Index>(flat % rows), j = static_cast<Eigen::Index>(flat / rows);
      z.row(i) += delta * act_[layer].row(j);
    } else {
      z.row(static_cast<Eigen::Index>(flat - wsize)).array() += delta;
    }
    for (std::size_t l = layer; l + 1 < w_.size(); ++l) {
      for (Eigen::Index k = 0; k < z.size(); ++k) {
        if ((z.data()[k] > 0) != pattern_[offsets_[l] + static_cast<std::size_t>(k)]) return std::nullopt;
      }
      Mat next = w_[l + 1] * z.cwiseMax(Real(0));
      next.colwise() += b_[l + 1];
      z = std::move(next);
    }
    return head_loss(z);
  }

 private:
  Real head_loss(const Mat& logits) const {
    Real total = 0;
    for (std::size_t c = 0; c < labels_.size(); ++c) {
      total += log_softmax_loss(Vec(logits.col(static_cast<Eigen::Index>(c))), labels_[c]);
    }
    return total / static_cast<Real>(labels_.size());
  }

  std::vector<std::size_t> labels_;
  std::vector<Mat> w_;
  std::vector<Vec> b_;
  std::vector<Mat> act_;  // input to each layer
  std::vector<Mat> pre_;  // pre-activation of each layer
  std::vector<bool> pattern_;
  std::vector<std::size_t> offsets_;
  Real base_loss_ = 0;
};

}  // namespace detail

/// Compares analytic gradients with (L(p + h) - L(p - h)) / 2h on
/// `per_layer` randomly chosen parameters (weights and biases) of every
/// layer. The probe losses are evaluated in extended precision.
///
/// Two kinds of parameters are redrawn rather than compared:
///  - probes that cross a ReLU kink (counted in kink_skips);
///  - gradients too small for the difference quotient to resolve, i.e.
///    below 1e6 times its rounding floor eps * |L| / h (resolution_skips).
inline GradCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                      std::span<const std::size_t> labels, std::size_t per_layer,
                                      std::uint64_t seed, double h = 1e-5) {
  using Real = detail::ProbeNet::Real;
  const BatchGradients analytic = gradients(model, inputs, labels);
  const detail::ProbeNet probe(model, inputs, labels);
  std::mt19937_64 rng(seed);

  GradCheckResult result;
  result.resolution_floor = static_cast<double>(1e6L * std::numeric_limits<Real>::epsilon() *
                                                std::max(Real(1), std::abs(probe.base_loss())) / h);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto count = static_cast<std::size_t>(model.weights[l].size() + model.biases[l].size());
    std::vector<std::size_t> pool(count);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::shuffle(pool.begin(), pool.end(), rng);

    GradCheckLayer layer;
    layer.layer = l;
    for (std::size_t flat : pool) {
      if (layer.sampled == per_layer) break;
      const auto plus = probe.shifted_loss(l, flat, Real(h));
      const auto minus = probe.shifted_loss(l, flat, Real(-h));
      if (!plus || !minus) {
        ++layer.kink_skips;
        continue;
      }
      const double numeric = static_cast<double>((*plus - *minus) / (2 * static_cast<Real>(h)));
      const double grad = detail::gradient_ref(analytic.grads, l, flat);
      if (std::max(std::abs(grad), std::abs(numeric)) < result.resolution_floor) {
        ++layer.resolution_skips;
        continue;
      }
      layer.max_relative_error = std::max(layer.max_relative_error, relative_error(grad, numeric));
      ++layer.sampled;
    }
    result.max_relative_error = std::max(result.max_relative_error, layer.max_relative_error);
    result.layers.push_back(layer);
  }
  return result;
}

// JSON form: {"arch": {"layer_sizes": [...]}, "seed": n,
//             "layers": [{"weights": [[row], ...], "biases": [...]}, ...]}
// nlohmann/json prints doubles in shortest round-trip form, so a
// save/load cycle reproduces every parameter exactly.
inline nlohmann::json model_to_json(const MlpModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l];
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index j = 0; j < w.cols(); ++j) row[static_cast<std::size_t>(j)] = w(i, j);
      rows.push_back(row);
    }
    const auto& b = model.biases[l];
    layers.push_back({{"weights", rows}, {"biases", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return {{"arch", {{"layer_sizes", model.arch.layer_sizes}}},
          {"seed", model.init_seed},
          {"layers", layers}};
}

inline MlpModel model_from_json(const nlohmann::json& j) {
  MlpModel model;
  try {
    model.arch.layer_sizes = j.at("arch").at("layer_sizes").get<std::vector<std::size_t>>();
    model.init_seed = j.at("seed").get<std::uint64_t>();
    for (const auto& layer : j.at("layers")) {
      const auto rows = layer.at("weights").get<std::vector<std::vector<double>>>();
      const auto bias = layer.at("biases").get<std::vector<double>>();
      const auto cols = rows.empty() ? std::size_t{0} : rows.front().size();
      Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ConfigError("model JSON: ragged weight matrix");
        for (std::size_t c = 0; c < cols; ++c) {
          w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
      }
      model.weights.push_back(std::move(w));
      model.biases.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
  model.validate();
  return model;
}

}  // namespace whisker
