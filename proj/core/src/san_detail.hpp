#pragma once

#include <cstdint>
#include <vector>

#include "attnrank/random.hpp"
#include "attnrank/san.hpp"

namespace attnrank::detail {

// Random stream ids derived from SanConfig::seed.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kDropoutStream = 1;
inline constexpr std::uint64_t kEpochStreamBase = 2;

// Column-per-instance activations of one batch, kept for backpropagation.
struct BatchActivations {
  Matrix xt;                  // features x batch
  std::vector<Matrix> heads;  // per-head softmax attention
  Matrix attention;           // head average
  Matrix omega;
  Matrix pre_hidden;
  Matrix hidden;
  Matrix dropout_scale;  // empty when dropout is off
  Matrix hidden_out;
  Matrix logits;
  Matrix probs;
};

void softmax_columns(Matrix& m);
void check_features(const SanModel& model, Eigen::Index cols);

// Dropout masks are drawn only when dropout_rng is non-null.
BatchActivations run_batch(const SanModel& model, const Matrix& xt, Rng* dropout_rng);

int argmax_lowest(const Eigen::Ref<const Vector>& v);

}  // namespace attnrank::detail
