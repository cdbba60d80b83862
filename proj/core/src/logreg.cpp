#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/eval.hpp"

namespace attnrank {
namespace {

// Row-wise softmax of X W^T + b.
Matrix class_probabilities(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix logits = x * w.transpose();
  logits.rowwise() += b.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return logits;
}

struct ObjectiveAndGradient {
  double value = 0.0;
  Matrix grad_w;
  Vector grad_b;
};

ObjectiveAndGradient evaluate(const Matrix& x, std::span<const int> y, const Matrix& w, const Vector& b, double c) {
  const auto n = static_cast<double>(x.rows());
  Matrix logits = x * w.transpose();
  logits.rowwise() += b.transpose();
  double ce = 0.0;
  Matrix residual(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    ce += lse - row(y[i]);
    residual.row(i) = (row.array() - lse).exp();
    residual(i, y[i]) -= 1.0;
  }
  ObjectiveAndGradient out;
  out.value = ce / n + w.squaredNorm() / (2.0 * c * n);
  out.grad_w = residual.transpose() * x / n + w / (c * n);
  out.grad_b = residual.colwise().sum().transpose() / n;
  return out;
}

}  // namespace

std::vector<int> LogRegModel::predict(const Matrix& features) const {
  if (features.cols() != weights.cols()) {
    throw DimensionError(fmt::format("input has {} features, model expects {}", features.cols(), weights.cols()));
  }
  const Matrix probs = class_probabilities(features, weights, bias);
  std::vector<int> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs.cols(); ++k) {
      if (probs(i, k) > probs(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double logreg_objective(const Matrix& features, std::span<const int> labels, std::size_t n_classes,
                        const Matrix& weights, const Vector& bias, double c) {
  if (weights.rows() != static_cast<Eigen::Index>(n_classes)) throw DimensionError("weights do not match n_classes");
  return evaluate(features, labels, weights, bias, c).value;
}

LogRegModel train_logreg(const Matrix& features, std::span<const int> labels, double c, std::size_t max_iters,
                         double tolerance, std::size_t n_classes) {
  if (!(c > 0.0)) throw ParameterError("regularization C must be positive");
  if (max_iters == 0) throw ParameterError("max_iters must be positive");
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  if (features.rows() == 0) throw DimensionError("no training instances");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DimensionError(fmt::format("{} rows but {} labels", features.rows(), labels.size()));
  }
  int max_label = -1;
  for (int y : labels) {
    if (y < 0) throw DimensionError("negative label");
    max_label = std::max(max_label, y);
  }
  if (n_classes == 0) n_classes = static_cast<std::size_t>(max_label) + 1;
  if (static_cast<std::size_t>(max_label) >= n_classes) throw DimensionError("label outside [0, n_classes)");
  {
    std::vector<char> seen(n_classes, 0);
    std::size_t distinct = 0;
    for (int y : labels) {
      if (!seen[static_cast<std::size_t>(y)]) ++distinct;
      seen[static_cast<std::size_t>(y)] = 1;
    }
    if (distinct < 2) throw InputError("logistic regression needs at least 2 classes in the training data");
  }

  const auto k = static_cast<Eigen::Index>(n_classes);
  LogRegModel model;
  model.regularization_c = c;
  model.weights = Matrix::Zero(k, features.cols());
  model.bias = Vector::Zero(k);

  auto current = evaluate(features, labels, model.weights, model.bias, c);
  if (!std::isfinite(current.value)) throw TrainingError("non-finite objective at initialisation");
  model.objective_trace.push_back(current.value);

  constexpr double kArmijo = 1e-4;
  double step = 1.0;
  Matrix prev_w;
  Vector prev_b;
  Matrix prev_gw;
  Vector prev_gb;
  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    const double grad_sq = current.grad_w.squaredNorm() + current.grad_b.squaredNorm();
    if (std::sqrt(grad_sq) < tolerance) break;

    // Barzilai-Borwein guess for the trial step, then backtrack.
    if (it > 0) {
      const double sw = (model.weights - prev_w).squaredNorm() + (model.bias - prev_b).squaredNorm();
      const double sy = ((model.weights - prev_w).cwiseProduct(current.grad_w - prev_gw)).sum() +
                        (model.bias - prev_b).dot(current.grad_b - prev_gb);
      if (sy > 0.0 && std::isfinite(sw / sy)) step = sw / sy;
    }

    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      Matrix w = model.weights - step * current.grad_w;
      Vector b = model.bias - step * current.grad_b;
      auto trial = evaluate(features, labels, w, b, c);
      if (std::isfinite(trial.value) && trial.value <= current.value - kArmijo * step * grad_sq) {
        prev_w = std::move(model.weights);
        prev_b = std::move(model.bias);
        prev_gw = std::move(current.grad_w);
        prev_gb = std::move(current.grad_b);
        model.weights = std::move(w);
        model.bias = std::move(b);
        current = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    model.objective_trace.push_back(current.value);
  }
  if (!std::isfinite(current.value)) {
    throw TrainingError(fmt::format("non-finite objective after {} iterations", it));
  }
  model.iterations = it;
  model.final_objective = current.value;
  return model;
}

double f1_macro(std::span<const int> predictions, std::span<const int> truth, std::size_t n_classes) {
  if (predictions.size() != truth.size()) {
    throw DimensionError(fmt::format("{} predictions for {} labels", predictions.size(), truth.size()));
  }
  if (truth.empty()) throw DimensionError("f1_macro needs at least one instance");
  if (n_classes == 0) {
    int max_label = 0;
    for (int y : truth) max_label = std::max(max_label, y);
    for (int y : predictions) max_label = std::max(max_label, y);
    n_classes = static_cast<std::size_t>(max_label) + 1;
  }
  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto p = static_cast<std::size_t>(predictions[i]);
    const auto t = static_cast<std::size_t>(truth[i]);
    if (p >= n_classes || t >= n_classes) throw DimensionError("label outside [0, n_classes)");
    if (p == t) {
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom > 0) sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(n_classes);
}

}  // namespace attnrank
