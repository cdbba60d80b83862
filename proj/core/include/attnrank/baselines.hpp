#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "attnrank/importance.hpp"
#include "attnrank/tabular.hpp"

namespace attnrank {

struct ReliefFParams {
  std::size_t n_neighbors = 10;
  std::optional<std::size_t> sample_size;  // nullopt: every instance is a reference point
  std::uint64_t seed = 0;
};

// Multi-class ReliefF. Hits and misses are the nearest neighbours in
// Euclidean distance over all features (ties to the lower index); per-feature
// differences are normalised by the feature's range. Raw weights are shifted
// by their minimum so every score is >= 0; the shift is stored in
// metadata["offset"]. A class too small for n_neighbors uses fewer
// neighbours and a warning is recorded in metadata["warnings"].
ImportanceVector relieff(const Dataset& data, const ReliefFParams& params = {});

// Plug-in mutual information (bits) between each equal-frequency-binned
// feature and the label. Tied values always share a bin.
ImportanceVector mutual_information(const Dataset& data, std::size_t n_bins = 10);

// Bin index per value: rank-based equal-frequency bins, ties collapsed onto
// the bin of their first rank.
std::vector<int> equal_frequency_bins(const std::vector<double>& values, std::size_t n_bins);

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_features_per_split;  // nullopt: floor(sqrt(n_features)), at least 1
  std::size_t min_leaf_size = 1;
  std::uint64_t seed = 0;
  // Worker threads for tree growing; 0 picks the hardware concurrency.
  // Results do not depend on this value.
  std::size_t threads = 1;
};

// One CART node. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int prediction = 0;  // majority class of the node's bootstrap sample
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  // Impurity decrease per feature, summed over each tree then averaged.
  std::vector<double> importances;

  // Majority vote over trees, ties to the lowest class id.
  std::vector<int> predict(const Matrix& x) const;
};

// Grows n_trees Gini trees on bootstrap samples. Tree t draws from a stream
// derived from (seed, t), so the forest is independent of thread scheduling.
RandomForest fit_forest(const Dataset& data, const ForestParams& params = {});

// Genie3-style importance: sum over splits of (node fraction x Gini
// decrease), per tree, averaged over trees.
ImportanceVector random_forest_importance(const Dataset& data, const ForestParams& params = {});

// Fits a forest on `data` and predicts the rows of `test`.
std::vector<int> predict_forest(const Dataset& data, const ForestParams& params, const Dataset& test);

}  // namespace attnrank
