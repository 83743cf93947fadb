#pragma once

// Fully connected ReLU network with a logistic output, trained by
// full-batch momentum gradient descent on
//   J(w) = sum_i (out(f_i) - label_i)^2 + lambda * sum(weights^2)
// with inverted dropout on the hidden layers. Biases are not regularized.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/matrix.hpp"
#include "bkjump/metrics.hpp"
#include "bkjump/rng.hpp"
#include "bkjump/standardize.hpp"

namespace bkj {

inline constexpr std::size_t kHiddenWidth = 12;

/// Layer widths from input to output; the output width is always 1.
/// Parameters are stored flat, layer by layer: weights (out x in,
/// row-major) followed by biases (out).
struct MlpModel {
  std::vector<std::size_t> layer_sizes;
  std::vector<double> params;

  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  std::size_t input_dims() const { return layer_sizes.front(); }

  std::size_t weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += (layer_sizes[l] + 1) * layer_sizes[l + 1];
    return off;
  }
  std::size_t bias_offset(std::size_t layer) const {
    return weight_offset(layer) + layer_sizes[layer] * layer_sizes[layer + 1];
  }

  /// Sum of squared weights, biases excluded.
  double weight_norm2() const {
    double s = 0.0;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const std::size_t w0 = weight_offset(l), w1 = bias_offset(l);
      for (std::size_t p = w0; p < w1; ++p) s += params[p] * params[p];
    }
    return s;
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

inline std::vector<std::size_t> default_layer_sizes(std::size_t inputs = 9) {
  return {inputs, kHiddenWidth, kHiddenWidth, 1};
}

inline std::size_t parameter_count(std::span<const std::size_t> sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += (sizes[l] + 1) * sizes[l + 1];
  return n;
}

inline void validate_layer_sizes(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2) throw ArgumentError("mlp: need at least input and output layers");
  if (sizes.back() != 1) throw ArgumentError("mlp: output layer must have width 1");
  for (std::size_t s : sizes)
    if (s == 0) throw ArgumentError("mlp: layer widths must be positive");
}

/// Weights i.i.d. N(0, init_std^2), biases 0.
inline MlpModel init_mlp(std::uint64_t seed, std::vector<std::size_t> sizes = default_layer_sizes(),
                         double init_std = 0.1) {
  validate_layer_sizes(sizes);
  MlpModel m;
  m.layer_sizes = std::move(sizes);
  m.params.assign(parameter_count(m.layer_sizes), 0.0);
  Rng rng(seed);
  for (std::size_t l = 0; l < m.num_layers(); ++l)
    for (std::size_t p = m.weight_offset(l); p < m.bias_offset(l); ++p) m.params[p] = init_std * rng.normal();
  return m;
}

enum class Mode { Train, Infer };

/// Per-sample multipliers on hidden activations: 0 for dropped units,
/// 1/(1-rate) for kept ones. Row r belongs to sample r; columns run over
/// the hidden units of all hidden layers in order.
struct DropoutMask {
  Matrix scale;

  bool empty() const { return scale.rows() == 0; }
};

inline std::size_t hidden_unit_count(const MlpModel& m) {
  std::size_t n = 0;
  for (std::size_t l = 1; l + 1 < m.layer_sizes.size(); ++l) n += m.layer_sizes[l];
  return n;
}

inline DropoutMask draw_dropout_mask(const MlpModel& m, std::size_t samples, double rate, Rng& rng) {
  DropoutMask mask{Matrix(samples, hidden_unit_count(m), 1.0)};
  if (rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t r = 0; r < samples; ++r)
    for (double& v : mask.scale.row(r)) v = rng.uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

/// Pre-activations and activations of one forward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> z;     // per layer
  std::vector<std::vector<double>> act;   // act[0] = input, act[l+1] = output of layer l
  double output = 0.0;
};

inline void forward_trace(const MlpModel& m, std::span<const double> x, std::span<const double> mask_row,
                          ForwardTrace& t) {
  const std::size_t layers = m.num_layers();
  t.z.resize(layers);
  t.act.resize(layers + 1);
  t.act[0].assign(x.begin(), x.end());
  std::size_t mask_pos = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
    const double* w = m.params.data() + m.weight_offset(l);
    const double* b = m.params.data() + m.bias_offset(l);
    auto& z = t.z[l];
    auto& a = t.act[l + 1];
    z.assign(out, 0.0);
    a.assign(out, 0.0);
    const auto& prev = t.act[l];
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * prev[i];
      z[o] = s;
    }
    if (l + 1 < layers) {
      for (std::size_t o = 0; o < out; ++o) {
        const double scale = mask_row.empty() ? 1.0 : mask_row[mask_pos + o];
        a[o] = z[o] > 0.0 ? z[o] * scale : 0.0;
      }
      mask_pos += out;
    } else {
      a[0] = logistic(z[0]);
    }
  }
  t.output = t.act[layers][0];
}

inline void check_input(const MlpModel& m, std::span<const double> x) {
  if (x.size() != m.input_dims()) throw ArgumentError("mlp: input dimension mismatch");
}

inline void check_batch(const MlpModel& m, const Matrix& x, std::span<const int> labels, const DropoutMask* mask) {
  if (x.rows() != labels.size()) throw ArgumentError("mlp: features/labels size mismatch");
  if (x.rows() > 0 && x.cols() != m.input_dims()) throw ArgumentError("mlp: input dimension mismatch");
  if (mask && !mask->empty() &&
      (mask->scale.rows() != x.rows() || mask->scale.cols() != hidden_unit_count(m)))
    throw ArgumentError("mlp: dropout mask shape mismatch");
  for (int l : labels)
    if (l != 0 && l != 1) throw ArgumentError("mlp: labels must be 0 or 1");
}

inline std::span<const double> mask_row(const DropoutMask* mask, std::size_t r) {
  if (!mask || mask->empty()) return {};
  return mask->scale.row(r);
}

}  // namespace detail

/// Output in (0, 1). Train mode applies `mask_row` (one sample's row of a
/// DropoutMask); infer mode ignores it.
inline double forward(const MlpModel& m, std::span<const double> x, Mode mode = Mode::Infer,
                      std::span<const double> mask_row = {}) {
  detail::check_input(m, x);
  if (mode == Mode::Train && !mask_row.empty() && mask_row.size() != hidden_unit_count(m))
    throw ArgumentError("mlp: dropout mask shape mismatch");
  detail::ForwardTrace t;
  detail::forward_trace(m, x, mode == Mode::Train ? mask_row : std::span<const double>{}, t);
  return t.output;
}

/// Output pre-activation (logit). Monotone in forward(), so it ranks inputs
/// the same way without the ties logistic saturation creates in doubles.
inline double forward_logit(const MlpModel& m, std::span<const double> x) {
  detail::check_input(m, x);
  detail::ForwardTrace t;
  detail::forward_trace(m, x, {}, t);
  return t.z.back()[0];
}

inline std::vector<double> forward_batch(const MlpModel& m, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = forward(m, x.row(r));
  return out;
}

/// Objective on a batch; `mask` (optional) puts the forward pass in train mode.
inline double loss_j(const MlpModel& m, const Matrix& x, std::span<const int> labels, double lambda,
                     const DropoutMask* mask = nullptr) {
  detail::check_batch(m, x, labels, mask);
  detail::ForwardTrace t;
  double data = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    detail::forward_trace(m, x.row(r), detail::mask_row(mask, r), t);
    const double e = t.output - labels[r];
    data += e * e;
  }
  return data + lambda * m.weight_norm2();
}

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as MlpModel::params
};

/// Exact gradient of loss_j under a fixed dropout mask, by backpropagation.
/// The ReLU derivative at 0 is taken as 0.
inline LossGradient loss_and_grad(const MlpModel& m, const Matrix& x, std::span<const int> labels, double lambda,
                                  const DropoutMask* mask = nullptr) {
  detail::check_batch(m, x, labels, mask);
  const std::size_t layers = m.num_layers();
  LossGradient out;
  out.grad.assign(m.params.size(), 0.0);
  detail::ForwardTrace t;
  std::vector<double> delta, prev_delta;
  std::vector<std::size_t> mask_start(layers, 0);
  for (std::size_t l = 1; l < layers; ++l) mask_start[l] = mask_start[l - 1] + m.layer_sizes[l];

  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto mrow = detail::mask_row(mask, r);
    detail::forward_trace(m, x.row(r), mrow, t);
    const double e = t.output - labels[r];
    out.loss += e * e;
    delta.assign(1, 2.0 * e * t.output * (1.0 - t.output));
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = m.layer_sizes[l], outw = m.layer_sizes[l + 1];
      const std::size_t w0 = m.weight_offset(l), b0 = m.bias_offset(l);
      const auto& a = t.act[l];
      for (std::size_t o = 0; o < outw; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        for (std::size_t i = 0; i < in; ++i) out.grad[w0 + o * in + i] += d * a[i];
        out.grad[b0 + o] += d;
      }
      if (l == 0) break;
      // back through layer l-1's ReLU and its dropout scale
      prev_delta.assign(in, 0.0);
      const auto& z = t.z[l - 1];
      for (std::size_t i = 0; i < in; ++i) {
        if (!(z[i] > 0.0)) continue;
        const double scale = mrow.empty() ? 1.0 : mrow[mask_start[l - 1] + i];
        if (scale == 0.0) continue;
        double s = 0.0;
        for (std::size_t o = 0; o < outw; ++o) s += m.params[w0 + o * in + i] * delta[o];
        prev_delta[i] = s * scale;
      }
      delta.swap(prev_delta);
    }
  }
  for (std::size_t l = 0; l < layers; ++l)
    for (std::size_t p = m.weight_offset(l); p < m.bias_offset(l); ++p) out.grad[p] += 2.0 * lambda * m.params[p];
  out.loss += lambda * m.weight_norm2();
  return out;
}

inline std::vector<double> grad(const MlpModel& m, const Matrix& x, std::span<const int> labels, double lambda,
                                const DropoutMask* mask = nullptr) {
  return loss_and_grad(m, x, labels, lambda, mask).grad;
}

/// forward(f) >= 0.5 means jump.
inline int predict(const MlpModel& m, std::span<const double> f) { return forward(m, f) >= 0.5 ? 1 : 0; }

struct TrainConfig {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double lambda = 1e-2;
  std::size_t max_epochs = 150;
  double min_grad = 1e-6;
  double dropout_rate = 0.2;
  double init_std = 0.1;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ArgumentError("TrainConfig: learning_rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ArgumentError("TrainConfig: momentum must be in [0, 1)");
    if (!(lambda > 0.0)) throw ArgumentError("TrainConfig: lambda must be strictly positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ArgumentError("TrainConfig: dropout_rate must be in [0, 1)");
    if (!(init_std >= 0.0)) throw ArgumentError("TrainConfig: init_std must be nonnegative");
    if (!(min_grad >= 0.0)) throw ArgumentError("TrainConfig: min_grad must be nonnegative");
  }
};

struct MlpTrainResult {
  MlpModel model;        // snapshot with the best eval max(TP+TN)
  MlpModel final_model;  // last iterate
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_eval_accuracy = 0.0;
  bool stopped_on_gradient = false;
  std::vector<double> loss_history;  // objective at the start of each epoch, under that epoch's mask
};

namespace detail {
inline constexpr std::uint64_t kDropoutStream = 7;

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace detail

/// Inputs must already be standardized. Stops after max_epochs or when the
/// gradient infinity norm drops below min_grad, and returns the iterate
/// with the best eval-split max(TP+TN) (later epochs win ties).
inline MlpTrainResult train_mlp(const Matrix& train_x, std::span<const int> train_y, const Matrix& eval_x,
                                std::span<const int> eval_y, const TrainConfig& cfg) {
  cfg.validate();
  if (train_x.rows() == 0) throw ArgumentError("train_mlp: empty training set");
  MlpTrainResult res;
  MlpModel m = init_mlp(cfg.seed, default_layer_sizes(train_x.cols()), cfg.init_std);
  auto eval_accuracy = [&](const MlpModel& model) {
    std::vector<double> s(eval_x.rows());
    for (std::size_t r = 0; r < eval_x.rows(); ++r) s[r] = forward_logit(model, eval_x.row(r));
    return max_tp_tn(s, eval_y).accuracy;
  };
  res.model = m;
  res.best_eval_accuracy = eval_accuracy(m);
  std::vector<double> velocity(m.params.size(), 0.0);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng rng(substream_seed(cfg.seed, detail::kDropoutStream, epoch));
    const DropoutMask mask = draw_dropout_mask(m, train_x.rows(), cfg.dropout_rate, rng);
    const LossGradient lg = loss_and_grad(m, train_x, train_y, cfg.lambda, &mask);
    if (!std::isfinite(lg.loss))
      throw NumericError("train_mlp: non-finite loss at epoch " + std::to_string(epoch));
    res.loss_history.push_back(lg.loss);
    if (detail::max_abs(lg.grad) < cfg.min_grad) {
      res.stopped_on_gradient = true;
      break;
    }
    for (std::size_t p = 0; p < m.params.size(); ++p) {
      velocity[p] = cfg.momentum * velocity[p] - cfg.learning_rate * lg.grad[p];
      m.params[p] += velocity[p];
    }
    for (double p : m.params)
      if (!std::isfinite(p)) throw NumericError("train_mlp: non-finite parameters at epoch " + std::to_string(epoch));
    res.epochs = epoch;
    const double acc = eval_accuracy(m);
    if (acc >= res.best_eval_accuracy) {
      res.best_eval_accuracy = acc;
      res.best_epoch = epoch;
      res.model = m;
    }
  }
  res.final_model = std::move(m);
  return res;
}

/// Network plus the training-split standardizer; takes raw feature rows.
struct MlpClassifier {
  Standardizer standardizer;
  MlpModel net;

  double output(std::span<const double> raw) const { return forward(net, apply_standardizer(standardizer, raw)); }
  /// Ranking score: the output logit, monotone in output().
  double score(std::span<const double> raw) const { return forward_logit(net, apply_standardizer(standardizer, raw)); }
  int predict(std::span<const double> raw) const { return output(raw) >= 0.5 ? 1 : 0; }

  std::vector<double> scores(const Matrix& raw) const {
    std::vector<double> out(raw.rows());
    for (std::size_t r = 0; r < raw.rows(); ++r) out[r] = score(raw.row(r));
    return out;
  }
};

inline MlpClassifier train_mlp_classifier(const Matrix& train_x, std::span<const int> train_y, const Matrix& eval_x,
                                          std::span<const int> eval_y, const TrainConfig& cfg,
                                          MlpTrainResult* details = nullptr) {
  MlpClassifier c;
  c.standardizer = fit_standardizer(train_x);
  auto res = train_mlp(apply_standardizer(c.standardizer, train_x), train_y,
                       apply_standardizer(c.standardizer, eval_x), eval_y, cfg);
  c.net = res.model;
  if (details) *details = std::move(res);
  return c;
}

}  // namespace bkj
