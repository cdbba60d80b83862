#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "attnrank/importance.hpp"
#include "attnrank/random.hpp"
#include "attnrank/tabular.hpp"

namespace attnrank {

// Self-attention network hyperparameters.
struct SanConfig {
  std::size_t hidden_dim = 128;
  std::size_t epochs = 32;
  std::size_t batch_size = 5;
  double learning_rate = 0.001;
  double dropout_rate = 0.20;
  std::size_t n_heads = 1;
  double selu_lambda = 1.05070098;
  double selu_alpha = 1.67326324;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;

  // Throws ParameterError when a field is outside its domain.
  void validate() const;
};

// Trainable tensors of a SAN. Also used as the gradient container, since
// gradients have exactly the parameter shapes.
struct SanParams {
  std::vector<Matrix> attention_weights;  // per head, n_features x n_features
  std::vector<Vector> attention_biases;   // per head, n_features
  Matrix w1;                              // hidden x n_features
  Vector b1;                              // hidden
  Matrix w2;                              // n_classes x hidden
  Vector b2;                              // n_classes

  // Same shapes, all zeros.
  SanParams zeros_like() const;

  std::size_t parameter_count() const;

  // Calls fn(std::span<double>) on every tensor in a fixed order:
  // attention weights, attention biases (head order), w1, b1, w2, b2.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    for (auto& w : attention_weights) fn(std::span<double>(w.data(), static_cast<std::size_t>(w.size())));
    for (auto& b : attention_biases) fn(std::span<double>(b.data(), static_cast<std::size_t>(b.size())));
    fn(std::span<double>(w1.data(), static_cast<std::size_t>(w1.size())));
    fn(std::span<double>(b1.data(), static_cast<std::size_t>(b1.size())));
    fn(std::span<double>(w2.data(), static_cast<std::size_t>(w2.size())));
    fn(std::span<double>(b2.data(), static_cast<std::size_t>(b2.size())));
  }

  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    for (const auto& w : attention_weights) fn(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
    for (const auto& b : attention_biases) fn(std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
    fn(std::span<const double>(w1.data(), static_cast<std::size_t>(w1.size())));
    fn(std::span<const double>(b1.data(), static_cast<std::size_t>(b1.size())));
    fn(std::span<const double>(w2.data(), static_cast<std::size_t>(w2.size())));
    fn(std::span<const double>(b2.data(), static_cast<std::size_t>(b2.size())));
  }

  bool all_finite() const;
};

struct SanModel {
  SanParams params;
  SanConfig config;

  std::size_t n_features() const { return static_cast<std::size_t>(params.w1.cols()); }
  std::size_t n_classes() const { return static_cast<std::size_t>(params.w2.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(params.w1.rows()); }
  std::size_t n_heads() const { return params.attention_weights.size(); }
  std::size_t parameter_count() const { return params.parameter_count(); }
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, dense-layer
// biases likewise, attention biases zero. Deterministic in config.seed.
SanModel init_model(std::size_t n_features, std::size_t n_classes, const SanConfig& config);

// Numerically stable softmax (max-shifted).
Vector softmax(const Vector& v);

double selu(double x, double lambda = 1.05070098, double alpha = 1.67326324);

// Head-averaged softmax(W_h x + b_h): the attention vector of one instance.
Vector attention(const SanModel& model, const Vector& x);

// Attention layer output: x (Hadamard) head-averaged attention.
Vector omega(const SanModel& model, const Vector& x);

struct ForwardResult {
  Vector class_probs;
  Vector attention;
};

// Single-instance forward pass. Dropout on the hidden activation is applied
// only when train_mode is set; with train_mode == false `rng` is untouched.
ForwardResult forward(const SanModel& model, const Vector& x, bool train_mode, Rng& rng);

// Inference for many instances (rows of `x`). Returns n x n_classes.
Matrix predict_proba(const SanModel& model, const Matrix& x);

// Argmax of class probabilities per instance, ties to the lowest class id.
std::vector<int> predict(const SanModel& model, const Matrix& x);

// Head-averaged attention for every row of `x`. Returns n x n_features.
Matrix attention_batch(const SanModel& model, const Matrix& x);

struct LossAndGradients {
  double loss = 0.0;
  SanParams gradients;
};

// Mean cross-entropy of the batch (rows of batch_x) and its exact gradient
// with respect to every parameter. Draws dropout masks from `rng` when the
// configured dropout rate is positive.
LossAndGradients loss_and_gradients(const SanModel& model, const Matrix& batch_x, std::span<const int> batch_y,
                                    Rng& rng);

// Minibatch Adam training. Epoch shuffles are reseeded from config.seed and
// the epoch counter, so the result is a pure function of (data, config).
SanModel train(const Dataset& data, const SanConfig& config);

// Extractors. All of them read the model only; safe to call concurrently.

// Mean attention over the instances of `data` ("attention").
ImportanceVector importance_instance(const SanModel& model, const Dataset& data);

// Mean attention with incorrectly predicted instances contributing zero,
// divided by the full instance count ("attentionPositive").
ImportanceVector importance_instance_clean(const SanModel& model, const Dataset& data);

// Head average of softmax(diag(W_h)) ("attentionGlobal"). Data independent.
ImportanceVector importance_global(const SanModel& model, const std::vector<std::string>& feature_names = {});

// Head average of the diagonal of the row-wise softmax of W_h
// ("attentionGlobalRWS"). Entries lie in (0, 1) but need not sum to 1.
ImportanceVector importance_global_rws(const SanModel& model, const std::vector<std::string>& feature_names = {});

// Text format with hexadecimal floats, so load(save(m)) is bit-exact.
void save_model(const SanModel& model, const std::filesystem::path& path);
SanModel load_model(const std::filesystem::path& path);

}  // namespace attnrank
