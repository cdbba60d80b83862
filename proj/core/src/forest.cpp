#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "attnrank/baselines.hpp"
#include "attnrank/error.hpp"
#include "attnrank/random.hpp"
#include "parallel.hpp"

namespace attnrank {
namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

int majority(const std::vector<std::size_t>& counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, std::size_t mtry, std::uint64_t seed)
      : data_(data), params_(params), mtry_(mtry), rng_(seed), importance_(data.n_features(), 0.0) {}

  DecisionTree build() {
    const std::size_t n = data_.n_instances();
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng_.below(n);
    root_size_ = static_cast<double>(n);
    DecisionTree tree;
    grow(tree, sample);
    return tree;
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  int grow(DecisionTree& tree, std::vector<std::size_t>& samples) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<std::size_t> counts(data_.n_classes(), 0);
    for (auto i : samples) ++counts[static_cast<std::size_t>(data_.labels[i])];
    tree.nodes[index].prediction = majority(counts);
    const double parent_gini = gini(counts, samples.size());
    if (parent_gini <= 0.0 || samples.size() < 2 * params_.min_leaf_size) return index;

    const Split split = find_split(samples, counts, parent_gini);
    if (split.feature < 0 || split.decrease < 0.0) return index;

    importance_[static_cast<std::size_t>(split.feature)] +=
        static_cast<double>(samples.size()) / root_size_ * split.decrease;

    std::vector<std::size_t> left, right;
    for (auto i : samples) {
      const double v = data_.features(static_cast<Eigen::Index>(i), split.feature);
      (v <= split.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[index].feature = split.feature;
    tree.nodes[index].threshold = split.threshold;
    const int l = grow(tree, left);
    const int r = grow(tree, right);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }

  // Examines at least mtry random features, and keeps drawing past mtry until
  // one admits a valid threshold or the features run out.
  Split find_split(const std::vector<std::size_t>& samples, const std::vector<std::size_t>& counts,
                   double parent_gini) {
    const std::size_t n_features = data_.n_features();
    std::vector<std::size_t> features(n_features);
    std::iota(features.begin(), features.end(), 0);
    rng_.shuffle(features);

    const std::size_t n = samples.size();
    const std::size_t n_classes = counts.size();
    Split best;
    bool any_valid = false;
    std::vector<std::pair<double, int>> column(n);
    std::vector<std::size_t> left_counts(n_classes), right_counts(n_classes);

    for (std::size_t visited = 0; visited < n_features; ++visited) {
      if (visited >= mtry_ && any_valid) break;
      const auto f = static_cast<Eigen::Index>(features[visited]);
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.features(static_cast<Eigen::Index>(samples[i]), f), data_.labels[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      right_counts = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto y = static_cast<std::size_t>(column[i].second);
        ++left_counts[y];
        --right_counts[y];
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (column[i].first == column[i + 1].first) continue;
        if (n_left < params_.min_leaf_size || n_right < params_.min_leaf_size) continue;
        any_valid = true;
        const double child = (static_cast<double>(n_left) * gini(left_counts, n_left) +
                              static_cast<double>(n_right) * gini(right_counts, n_right)) /
                             static_cast<double>(n);
        const double decrease = parent_gini - child;
        if (decrease > best.decrease) {
          double threshold = 0.5 * (column[i].first + column[i + 1].first);
          if (threshold >= column[i + 1].first) threshold = column[i].first;
          best = {static_cast<int>(f), threshold, std::max(decrease, 0.0)};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng rng_;
  double root_size_ = 1.0;
  std::vector<double> importance_;
};

}  // namespace

int DecisionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].prediction;
}

std::vector<int> RandomForest::predict(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != n_features) {
    throw DimensionError(fmt::format("input has {} features, forest expects {}", x.cols(), n_features));
  }
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<std::size_t> votes(n_classes);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : trees) ++votes[static_cast<std::size_t>(tree.predict(x.row(i)))];
    out[static_cast<std::size_t>(i)] = majority(votes);
  }
  return out;
}

RandomForest fit_forest(const Dataset& data, const ForestParams& params) {
  if (params.n_trees < 1) throw ParameterError("n_trees must be >= 1");
  if (params.min_leaf_size < 1) throw ParameterError("min_leaf_size must be >= 1");
  if (data.n_instances() == 0) throw InputError("cannot grow a forest on an empty dataset");
  if (data.labels.size() != data.n_instances()) throw DimensionError("labels do not match instances");
  const std::size_t n_features = data.n_features();
  std::size_t mtry = params.max_features_per_split.value_or(
      static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
  mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(n_features, 1));

  RandomForest forest;
  forest.n_features = n_features;
  forest.n_classes = std::max<std::size_t>(data.n_classes(), 1);
  forest.trees.resize(params.n_trees);
  std::vector<std::vector<double>> per_tree(params.n_trees);
  detail::parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
    TreeBuilder builder(data, params, mtry, derive_seed(params.seed, t));
    forest.trees[t] = builder.build();
    per_tree[t] = builder.importance();
  });

  forest.importances.assign(n_features, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t j = 0; j < n_features; ++j) forest.importances[j] += imp[j];
  }
  for (auto& v : forest.importances) v /= static_cast<double>(params.n_trees);
  return forest;
}

ImportanceVector random_forest_importance(const Dataset& data, const ForestParams& params) {
  const auto forest = fit_forest(data, params);
  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kRandomForest));
  iv.feature_names = data.feature_names;
  iv.scores = forest.importances;
  iv.metadata["n_trees"] = std::to_string(params.n_trees);
  iv.metadata["min_leaf_size"] = std::to_string(params.min_leaf_size);
  return iv;
}

std::vector<int> predict_forest(const Dataset& data, const ForestParams& params, const Dataset& test) {
  return fit_forest(data, params).predict(test.features);
}

}  // namespace attnrank
