#include "attnrank/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/random.hpp"

namespace attnrank {

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (int y : labels) {
    if (y >= 0 && static_cast<std::size_t>(y) < counts.size()) ++counts[y];
  }
  return counts;
}

void Dataset::validate() const {
  if (labels.size() != n_instances()) {
    throw InputError(fmt::format("dataset has {} rows but {} labels", n_instances(), labels.size()));
  }
  if (feature_names.size() != n_features()) {
    throw InputError(fmt::format("dataset has {} features but {} feature names", n_features(),
                                 feature_names.size()));
  }
  if (relevance_mask && relevance_mask->size() != n_features()) {
    throw InputError("relevance mask length differs from feature count");
  }
  if (!features.allFinite()) throw InputError("dataset contains NaN or infinite values");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes()) {
      throw InputError(fmt::format("label {} of instance {} is not a valid class id", labels[i], i));
    }
  }
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw InputError(fmt::format("class '{}' has no instances", class_names[c]));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) throw InputError(fmt::format("duplicate feature name '{}'", name));
  }
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(data.labels[rows[i]]);
  }
  out.feature_names = data.feature_names;
  out.class_names = data.class_names;
  out.target_name = data.target_name;
  out.relevance_mask = data.relevance_mask;
  return out;
}

Dataset select_features(const Dataset& data, std::span<const std::size_t> columns) {
  Dataset out;
  out.features.resize(data.features.rows(), static_cast<Eigen::Index>(columns.size()));
  std::vector<bool> mask;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.features.col(static_cast<Eigen::Index>(j)) = data.features.col(static_cast<Eigen::Index>(columns[j]));
    out.feature_names.push_back(data.feature_names[columns[j]]);
    if (data.relevance_mask) mask.push_back((*data.relevance_mask)[columns[j]]);
  }
  out.labels = data.labels;
  out.class_names = data.class_names;
  out.target_name = data.target_name;
  if (data.relevance_mask) out.relevance_mask = std::move(mask);
  return out;
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& data) {
  const auto n = data.features.rows();
  const auto d = data.features.cols();
  StandardizationParams params;
  params.means = Vector::Zero(d);
  params.std_devs = Vector::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = data.features.col(j);
    const double mean = n > 0 ? col.mean() : 0.0;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (col(i) - mean) * (col(i) - mean);
    params.means(j) = mean;
    params.std_devs(j) = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  return {apply_standardization(data, params), params};
}

Dataset apply_standardization(const Dataset& data, const StandardizationParams& params) {
  const auto d = data.features.cols();
  if (params.means.size() != d || params.std_devs.size() != d) {
    throw DimensionError(fmt::format("standardization params have {} entries, dataset has {} features",
                                     params.means.size(), d));
  }
  Dataset out = data;
  for (Eigen::Index j = 0; j < d; ++j) {
    auto col = out.features.col(j);
    if (params.std_devs(j) > 0.0) {
      col = (col.array() - params.means(j)) / params.std_devs(j);
    } else {
      col.setZero();
    }
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(const Dataset& data, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ParameterError(fmt::format("n_folds must be >= 2, got {}", n_folds));
  const auto counts = data.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < static_cast<std::size_t>(n_folds)) {
      throw ParameterError(fmt::format("class '{}' has {} instances, fewer than {} folds", data.class_names[c],
                                       counts[c], n_folds));
    }
  }
  std::vector<std::vector<std::size_t>> members(data.n_classes());
  for (std::size_t i = 0; i < data.labels.size(); ++i) members[data.labels[i]].push_back(i);

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.assignments.assign(data.n_instances(), -1);
  Rng rng(seed);
  // The dealing offset carries over between classes to even out fold sizes.
  std::size_t next = 0;
  for (auto& idx : members) {
    rng.shuffle(idx);
    for (std::size_t i : idx) {
      plan.assignments[i] = static_cast<int>(next % static_cast<std::size_t>(n_folds));
      ++next;
    }
  }
  return plan;
}

Dataset make_classification(std::size_t n_samples, std::size_t n_features, std::size_t n_informative,
                            std::uint64_t seed) {
  if (n_features == 0) throw ParameterError("n_features must be positive");
  if (n_informative < 1 || n_informative > n_features) {
    throw ParameterError(fmt::format("n_informative must be in [1, {}], got {}", n_features, n_informative));
  }
  if (n_samples < 4) throw ParameterError(fmt::format("n_samples must be >= 4, got {}", n_samples));

  Rng rng(seed);
  std::vector<int> labels(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) labels[i] = static_cast<int>(i % 2);
  rng.shuffle(labels);
  // Keep class "0" first in file order so a CSV round trip preserves ids.
  if (labels.front() == 1) {
    for (int& y : labels) y = 1 - y;
  }

  std::vector<std::size_t> positions(n_features);
  std::iota(positions.begin(), positions.end(), 0);
  rng.shuffle(positions);
  std::vector<bool> mask(n_features, false);
  for (std::size_t j = 0; j < n_informative; ++j) mask[positions[j]] = true;

  std::vector<double> direction(n_features, 0.0);
  for (std::size_t j = 0; j < n_features; ++j) {
    if (mask[j]) direction[j] = rng.bernoulli(0.5) ? 0.5 : -0.5;
  }

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(n_features));
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double sign = labels[i] == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n_features; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal() + sign * direction[j];
    }
  }
  data.labels = std::move(labels);
  for (std::size_t j = 0; j < n_features; ++j) data.feature_names.push_back(fmt::format("f{}", j));
  data.class_names = {"0", "1"};
  data.target_name = "class";
  data.relevance_mask = std::move(mask);
  return data;
}

}  // namespace attnrank
