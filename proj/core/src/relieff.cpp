#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "attnrank/baselines.hpp"
#include "attnrank/error.hpp"
#include "attnrank/random.hpp"

namespace attnrank {

ImportanceVector relieff(const Dataset& data, const ReliefFParams& params) {
  if (params.n_neighbors < 1) throw ParameterError("n_neighbors must be >= 1");
  const std::size_t n = data.n_instances();
  const auto f = data.features.cols();
  const std::size_t n_classes = data.n_classes();
  if (data.labels.size() != n) throw DimensionError("labels do not match instances");
  const auto counts = data.class_counts();
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] < 2) {
      throw InputError(fmt::format("class '{}' has {} instances; ReliefF needs at least 2 per class",
                                   data.class_names[c], counts[c]));
    }
  }

  Vector range = data.features.colwise().maxCoeff() - data.features.colwise().minCoeff();
  Vector inv_range(f);
  for (Eigen::Index j = 0; j < f; ++j) inv_range(j) = range(j) > 0.0 ? 1.0 / range(j) : 0.0;

  std::vector<std::size_t> references(n);
  std::iota(references.begin(), references.end(), 0);
  if (params.sample_size && *params.sample_size < n) {
    Rng rng(params.seed);
    rng.shuffle(references);
    references.resize(*params.sample_size);
    std::sort(references.begin(), references.end());
  }
  if (references.empty()) throw ParameterError("ReliefF sample_size must be positive");
  const auto m = static_cast<double>(references.size());

  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < n; ++i) members[data.labels[i]].push_back(i);

  std::vector<std::string> warnings;
  std::vector<std::size_t> k_hit(n_classes), k_miss(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    k_hit[c] = std::min(params.n_neighbors, counts[c] - 1);
    k_miss[c] = std::min(params.n_neighbors, counts[c]);
    if (k_hit[c] < params.n_neighbors) {
      warnings.push_back(fmt::format("class '{}' has {} instances; using {} neighbours", data.class_names[c],
                                     counts[c], k_hit[c]));
    }
  }

  Vector weights = Vector::Zero(f);
  Vector dist(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> candidates;
  for (std::size_t i : references) {
    const auto xi = data.features.row(static_cast<Eigen::Index>(i));
    dist = (data.features.rowwise() - xi).rowwise().squaredNorm();
    const int yi = data.labels[i];
    const double p_other = 1.0 - static_cast<double>(counts[yi]) / static_cast<double>(n);

    for (std::size_t c = 0; c < n_classes; ++c) {
      candidates.clear();
      for (std::size_t j : members[c]) {
        if (j != i) candidates.push_back(j);
      }
      const std::size_t k = static_cast<int>(c) == yi ? k_hit[c] : k_miss[c];
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                        [&](std::size_t a, std::size_t b) {
                          return dist(static_cast<Eigen::Index>(a)) < dist(static_cast<Eigen::Index>(b)) ||
                                 (dist(static_cast<Eigen::Index>(a)) == dist(static_cast<Eigen::Index>(b)) && a < b);
                        });
      Vector diff_sum = Vector::Zero(f);
      for (std::size_t r = 0; r < k; ++r) {
        const auto xj = data.features.row(static_cast<Eigen::Index>(candidates[r]));
        diff_sum += ((xi - xj).cwiseAbs().transpose()).cwiseProduct(inv_range);
      }
      const double denom = m * static_cast<double>(k);
      if (static_cast<int>(c) == yi) {
        weights -= diff_sum / denom;
      } else {
        const double prior = static_cast<double>(counts[c]) / static_cast<double>(n);
        weights += (prior / p_other) * diff_sum / denom;
      }
    }
  }

  const double offset = f > 0 ? weights.minCoeff() : 0.0;
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kReliefF));
  iv.feature_names = data.feature_names;
  iv.scores.resize(static_cast<std::size_t>(f));
  for (Eigen::Index j = 0; j < f; ++j) iv.scores[j] = weights(j) - offset;
  iv.metadata["offset"] = fmt::format("{}", offset);
  iv.metadata["n_neighbors"] = std::to_string(params.n_neighbors);
  iv.metadata["reference_points"] = std::to_string(references.size());
  if (!warnings.empty()) iv.metadata["warnings"] = fmt::format("{}", fmt::join(warnings, "; "));
  return iv;
}

}  // namespace attnrank
