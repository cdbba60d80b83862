#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/san.hpp"
#include "san_detail.hpp"

namespace attnrank {
namespace {

class Adam {
 public:
  Adam(const SanParams& shape, const SanConfig& cfg) : m_(shape.zeros_like()), v_(shape.zeros_like()), cfg_(cfg) {}

  void step(SanParams& params, const SanParams& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));

    std::vector<std::span<double>> p, m, v;
    std::vector<std::span<const double>> g;
    params.for_each_tensor([&](std::span<double> t) { p.push_back(t); });
    m_.for_each_tensor([&](std::span<double> t) { m.push_back(t); });
    v_.for_each_tensor([&](std::span<double> t) { v.push_back(t); });
    grads.for_each_tensor([&](std::span<const double> t) { g.push_back(t); });

    for (std::size_t k = 0; k < p.size(); ++k) {
      for (std::size_t i = 0; i < p[k].size(); ++i) {
        m[k][i] = cfg_.adam_beta1 * m[k][i] + (1.0 - cfg_.adam_beta1) * g[k][i];
        v[k][i] = cfg_.adam_beta2 * v[k][i] + (1.0 - cfg_.adam_beta2) * g[k][i] * g[k][i];
        const double m_hat = m[k][i] / c1;
        const double v_hat = v[k][i] / c2;
        p[k][i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.adam_epsilon);
      }
    }
  }

 private:
  SanParams m_;
  SanParams v_;
  const SanConfig& cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace

SanModel train(const Dataset& data, const SanConfig& config) {
  config.validate();
  const std::size_t n = data.n_instances();
  if (n < config.batch_size) {
    throw ParameterError(fmt::format("{} instances are fewer than the batch size {}", n, config.batch_size));
  }
  if (data.labels.size() != n) throw DimensionError("labels do not match instances");

  SanModel model = init_model(data.n_features(), data.n_classes(), config);
  Adam adam(model.params, model.config);
  Rng dropout_rng(derive_seed(config.seed, detail::kDropoutStream));

  std::vector<std::size_t> order(n);
  Matrix batch_x;
  std::vector<int> batch_y;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(config.seed, detail::kEpochStreamBase + epoch));
    shuffle_rng.shuffle(order);

    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t len = std::min(config.batch_size, n - start);
      batch_x.resize(static_cast<Eigen::Index>(len), data.features.cols());
      batch_y.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        batch_x.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(order[start + i]));
        batch_y[i] = data.labels[order[start + i]];
      }
      const auto lg = loss_and_gradients(model, batch_x, batch_y, dropout_rng);
      if (!std::isfinite(lg.loss) || !lg.gradients.all_finite()) {
        throw TrainingError(fmt::format("non-finite loss or gradient at epoch {}, batch {}", epoch, batch_index));
      }
      adam.step(model.params, lg.gradients);
      if (!model.params.all_finite()) {
        throw TrainingError(fmt::format("non-finite parameters after epoch {}, batch {}", epoch, batch_index));
      }
    }
  }
  return model;
}

}  // namespace attnrank
