#include "attnrank/san.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "san_detail.hpp"

namespace attnrank {

void SanConfig::validate() const {
  if (hidden_dim == 0) throw ParameterError("hidden_dim must be positive");
  if (batch_size == 0) throw ParameterError("batch_size must be positive");
  if (n_heads == 0) throw ParameterError("n_heads must be positive");
  if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ParameterError("dropout_rate must be in [0, 1)");
  if (!(selu_lambda > 0.0) || !(selu_alpha > 0.0)) throw ParameterError("SELU constants must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw ParameterError("Adam betas must be in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ParameterError("adam_epsilon must be positive");
}

SanParams SanParams::zeros_like() const {
  SanParams z;
  for (const auto& w : attention_weights) z.attention_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : attention_biases) z.attention_biases.push_back(Vector::Zero(b.size()));
  z.w1 = Matrix::Zero(w1.rows(), w1.cols());
  z.b1 = Vector::Zero(b1.size());
  z.w2 = Matrix::Zero(w2.rows(), w2.cols());
  z.b2 = Vector::Zero(b2.size());
  return z;
}

std::size_t SanParams::parameter_count() const {
  std::size_t count = 0;
  for_each_tensor([&](std::span<const double> t) { count += t.size(); });
  return count;
}

bool SanParams::all_finite() const {
  bool finite = true;
  for_each_tensor([&](std::span<const double> t) {
    for (double v : t) finite = finite && std::isfinite(v);
  });
  return finite;
}

SanModel init_model(std::size_t n_features, std::size_t n_classes, const SanConfig& config) {
  config.validate();
  if (n_features == 0 || n_classes == 0) throw ParameterError("model needs at least one feature and one class");
  const auto f = static_cast<Eigen::Index>(n_features);
  const auto c = static_cast<Eigen::Index>(n_classes);
  const auto h = static_cast<Eigen::Index>(config.hidden_dim);

  Rng rng(derive_seed(config.seed, detail::kInitStream));
  auto fill = [&rng](auto& tensor, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index i = 0; i < tensor.size(); ++i) tensor.data()[i] = rng.uniform(-bound, bound);
  };

  SanModel model;
  model.config = config;
  auto& p = model.params;
  for (std::size_t k = 0; k < config.n_heads; ++k) {
    Matrix w(f, f);
    fill(w, static_cast<double>(n_features));
    p.attention_weights.push_back(std::move(w));
    p.attention_biases.push_back(Vector::Zero(f));
  }
  p.w1.resize(h, f);
  fill(p.w1, static_cast<double>(n_features));
  p.b1.resize(h);
  fill(p.b1, static_cast<double>(n_features));
  p.w2.resize(c, h);
  fill(p.w2, static_cast<double>(config.hidden_dim));
  p.b2.resize(c);
  fill(p.b2, static_cast<double>(config.hidden_dim));
  return model;
}

Vector softmax(const Vector& v) {
  if (v.size() == 0) return v;
  const Vector e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

double selu(double x, double lambda, double alpha) {
  return x > 0.0 ? lambda * x : lambda * alpha * std::expm1(x);
}

namespace detail {

void softmax_columns(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    col = (col.array() - col.maxCoeff()).exp();
    col /= col.sum();
  }
}

void check_features(const SanModel& model, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != model.n_features()) {
    throw DimensionError(fmt::format("input has {} features, model expects {}", cols, model.n_features()));
  }
}

BatchActivations run_batch(const SanModel& model, const Matrix& xt, Rng* dropout_rng) {
  const auto& p = model.params;
  const auto& cfg = model.config;
  const auto k = static_cast<double>(p.attention_weights.size());

  BatchActivations a;
  a.xt = xt;
  a.attention = Matrix::Zero(xt.rows(), xt.cols());
  for (std::size_t h = 0; h < p.attention_weights.size(); ++h) {
    Matrix z = p.attention_weights[h] * xt;
    z.colwise() += p.attention_biases[h];
    softmax_columns(z);
    a.attention += z;
    a.heads.push_back(std::move(z));
  }
  a.attention /= k;
  a.omega = xt.cwiseProduct(a.attention);
  a.pre_hidden = p.w1 * a.omega;
  a.pre_hidden.colwise() += p.b1;
  a.hidden = a.pre_hidden.unaryExpr([&cfg](double v) { return selu(v, cfg.selu_lambda, cfg.selu_alpha); });
  if (dropout_rng != nullptr && cfg.dropout_rate > 0.0) {
    const double keep = 1.0 - cfg.dropout_rate;
    a.dropout_scale.resize(a.hidden.rows(), a.hidden.cols());
    for (Eigen::Index i = 0; i < a.dropout_scale.size(); ++i) {
      a.dropout_scale.data()[i] = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
    a.hidden_out = a.hidden.cwiseProduct(a.dropout_scale);
  } else {
    a.hidden_out = a.hidden;
  }
  a.logits = p.w2 * a.hidden_out;
  a.logits.colwise() += p.b2;
  a.probs = a.logits;
  softmax_columns(a.probs);
  return a;
}

int argmax_lowest(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace detail

Vector attention(const SanModel& model, const Vector& x) {
  detail::check_features(model, x.size());
  const auto& p = model.params;
  Vector out = Vector::Zero(x.size());
  for (std::size_t h = 0; h < p.attention_weights.size(); ++h) {
    out += softmax(p.attention_weights[h] * x + p.attention_biases[h]);
  }
  return out / static_cast<double>(p.attention_weights.size());
}

Vector omega(const SanModel& model, const Vector& x) { return x.cwiseProduct(attention(model, x)); }

ForwardResult forward(const SanModel& model, const Vector& x, bool train_mode, Rng& rng) {
  detail::check_features(model, x.size());
  const auto a = detail::run_batch(model, x, train_mode ? &rng : nullptr);
  return {a.probs.col(0), a.attention.col(0)};
}

Matrix predict_proba(const SanModel& model, const Matrix& x) {
  detail::check_features(model, x.cols());
  return detail::run_batch(model, x.transpose(), nullptr).probs.transpose();
}

std::vector<int> predict(const SanModel& model, const Matrix& x) {
  const Matrix probs = predict_proba(model, x);
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) out[i] = detail::argmax_lowest(probs.row(i).transpose());
  return out;
}

Matrix attention_batch(const SanModel& model, const Matrix& x) {
  detail::check_features(model, x.cols());
  const Matrix xt = x.transpose();
  const auto& p = model.params;
  Matrix acc = Matrix::Zero(xt.rows(), xt.cols());
  for (std::size_t h = 0; h < p.attention_weights.size(); ++h) {
    Matrix z = p.attention_weights[h] * xt;
    z.colwise() += p.attention_biases[h];
    detail::softmax_columns(z);
    acc += z;
  }
  acc /= static_cast<double>(p.attention_weights.size());
  return acc.transpose();
}

LossAndGradients loss_and_gradients(const SanModel& model, const Matrix& batch_x, std::span<const int> batch_y,
                                    Rng& rng) {
  if (batch_x.rows() == 0) throw DimensionError("empty batch");
  if (static_cast<std::size_t>(batch_x.rows()) != batch_y.size()) {
    throw DimensionError(fmt::format("batch has {} rows but {} labels", batch_x.rows(), batch_y.size()));
  }
  detail::check_features(model, batch_x.cols());
  const auto n_classes = static_cast<int>(model.n_classes());
  for (int y : batch_y) {
    if (y < 0 || y >= n_classes) throw DimensionError(fmt::format("label {} outside [0, {})", y, n_classes));
  }

  const auto& p = model.params;
  const auto& cfg = model.config;
  const auto a = detail::run_batch(model, batch_x.transpose(), &rng);
  const auto batch = static_cast<double>(batch_x.rows());

  LossAndGradients out;
  out.gradients = p.zeros_like();
  auto& g = out.gradients;

  // Cross-entropy via log-sum-exp of the logits.
  Matrix d_logits = a.probs;
  double loss = 0.0;
  for (Eigen::Index j = 0; j < a.logits.cols(); ++j) {
    const auto col = a.logits.col(j);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col.array() - m).exp().sum());
    loss += lse - col(batch_y[j]);
    d_logits(batch_y[j], j) -= 1.0;
  }
  out.loss = loss / batch;
  d_logits /= batch;

  g.w2 = d_logits * a.hidden_out.transpose();
  g.b2 = d_logits.rowwise().sum();

  Matrix d_hidden = p.w2.transpose() * d_logits;
  if (a.dropout_scale.size() > 0) d_hidden = d_hidden.cwiseProduct(a.dropout_scale);
  const Matrix selu_grad = a.pre_hidden.unaryExpr([&cfg](double v) {
    return v > 0.0 ? cfg.selu_lambda : cfg.selu_lambda * cfg.selu_alpha * std::exp(v);
  });
  const Matrix d_pre = d_hidden.cwiseProduct(selu_grad);
  g.w1 = d_pre * a.omega.transpose();
  g.b1 = d_pre.rowwise().sum();

  const Matrix d_omega = p.w1.transpose() * d_pre;
  const Matrix d_att = d_omega.cwiseProduct(a.xt) / static_cast<double>(p.attention_weights.size());
  for (std::size_t h = 0; h < p.attention_weights.size(); ++h) {
    const Matrix& s = a.heads[h];
    // Softmax Jacobian-vector product per column: s * (d - <s, d>).
    const Eigen::RowVectorXd dots = s.cwiseProduct(d_att).colwise().sum();
    Matrix d_z = d_att;
    d_z.rowwise() -= dots;
    d_z = d_z.cwiseProduct(s);
    g.attention_weights[h] = d_z * a.xt.transpose();
    g.attention_biases[h] = d_z.rowwise().sum();
  }
  return out;
}

namespace {

std::vector<std::string> names_or_default(const std::vector<std::string>& names, std::size_t n) {
  if (!names.empty()) {
    if (names.size() != n) {
      throw DimensionError(fmt::format("{} feature names for a model with {} features", names.size(), n));
    }
    return names;
  }
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(fmt::format("f{}", j));
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Rows per block when aggregating attention, so temporaries stay cache-sized.
constexpr Eigen::Index kAttentionBlock = 256;

// Calls fn(first_row, attention_block) over consecutive row blocks.
template <typename Fn>
void for_each_attention_block(const SanModel& model, const Matrix& x, Fn&& fn) {
  for (Eigen::Index start = 0; start < x.rows(); start += kAttentionBlock) {
    const Eigen::Index len = std::min(kAttentionBlock, x.rows() - start);
    fn(start, attention_batch(model, x.middleRows(start, len)));
  }
}

}  // namespace

ImportanceVector importance_instance(const SanModel& model, const Dataset& data) {
  if (data.n_instances() == 0) throw DimensionError("importance_instance needs at least one instance");
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.n_features()));
  for_each_attention_block(model, data.features,
                           [&](Eigen::Index, const Matrix& att) { acc += att.colwise().sum().transpose(); });
  acc /= static_cast<double>(data.n_instances());
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kAttention));
  iv.feature_names = names_or_default(data.feature_names, model.n_features());
  iv.scores = to_std(acc);
  iv.metadata["n_instances"] = std::to_string(data.n_instances());
  return iv;
}

ImportanceVector importance_instance_clean(const SanModel& model, const Dataset& data) {
  if (data.n_instances() == 0) throw DimensionError("importance_instance_clean needs at least one instance");
  if (data.labels.size() != data.n_instances()) throw DimensionError("labels do not match instances");
  const auto predicted = predict(model, data.features);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.n_features()));
  std::size_t correct = 0;
  for_each_attention_block(model, data.features, [&](Eigen::Index start, const Matrix& att) {
    for (Eigen::Index r = 0; r < att.rows(); ++r) {
      const auto i = static_cast<std::size_t>(start + r);
      if (predicted[i] == data.labels[i]) {
        acc += att.row(r).transpose();
        ++correct;
      }
    }
  });
  acc /= static_cast<double>(data.n_instances());
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kAttentionPositive));
  iv.feature_names = names_or_default(data.feature_names, model.n_features());
  iv.scores = to_std(acc);
  iv.metadata["n_instances"] = std::to_string(data.n_instances());
  iv.metadata["n_correct"] = std::to_string(correct);
  iv.metadata["accuracy"] = fmt::format("{}", static_cast<double>(correct) / static_cast<double>(data.n_instances()));
  return iv;
}

ImportanceVector importance_global(const SanModel& model, const std::vector<std::string>& feature_names) {
  const auto& heads = model.params.attention_weights;
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.n_features()));
  for (const auto& w : heads) acc += softmax(w.diagonal());
  acc /= static_cast<double>(heads.size());
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kAttentionGlobal));
  iv.feature_names = names_or_default(feature_names, model.n_features());
  iv.scores = to_std(acc);
  return iv;
}

ImportanceVector importance_global_rws(const SanModel& model, const std::vector<std::string>& feature_names) {
  const auto& heads = model.params.attention_weights;
  const auto f = static_cast<Eigen::Index>(model.n_features());
  Vector acc = Vector::Zero(f);
  for (const auto& w : heads) {
    for (Eigen::Index i = 0; i < f; ++i) {
      const auto row = w.row(i);
      const double m = row.maxCoeff();
      acc(i) += std::exp(w(i, i) - m) / (row.array() - m).exp().sum();
    }
  }
  acc /= static_cast<double>(heads.size());
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kAttentionGlobalRws));
  iv.feature_names = names_or_default(feature_names, model.n_features());
  iv.scores = to_std(acc);
  return iv;
}

}  // namespace attnrank
