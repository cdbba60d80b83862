#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace attnrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numeric feature matrix (instances x features) with integer class labels.
//
// Labels lie in [0, n_classes) and every class appears at least once.
// relevance_mask is only present for synthetic data with known ground truth.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::string target_name = "class";
  std::optional<std::vector<bool>> relevance_mask;

  std::size_t n_instances() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t n_classes() const { return class_names.size(); }

  // Per-class instance counts, indexed by class id.
  std::vector<std::size_t> class_counts() const;

  // Throws InputError if any invariant is broken (non-finite values, bad
  // labels, unused classes, duplicate feature names, size mismatches).
  void validate() const;
};

// Rows of `data` at `rows`, in the given order. Class names are kept as-is,
// so the result may contain classes with no instances; it is not validated.
Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);

// Columns of `data` at `columns`, in the given order (mask follows).
Dataset select_features(const Dataset& data, std::span<const std::size_t> columns);

struct StandardizationParams {
  Vector means;
  Vector std_devs;  // unbiased (n-1); zero for constant features
};

// Fits per-feature mean and sample standard deviation, returns the
// transformed dataset. Constant features map to all zeros.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& data);

// (x - mean) / std per feature with fitted params; zero-std features become 0.
Dataset apply_standardization(const Dataset& data, const StandardizationParams& params);

struct FoldPlan {
  int n_folds = 0;
  std::vector<int> assignments;  // fold id per instance
  std::uint64_t seed = 0;

  // Instance indices outside / inside fold `fold`, ascending.
  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> test_indices(int fold) const;
};

// Stratified k-fold assignment: each class is shuffled and dealt round-robin
// across folds, so per-fold class counts differ from proportional by < 1.
FoldPlan stratified_kfold(const Dataset& data, int n_folds, std::uint64_t seed);

// Binary synthetic problem: informative features are class-conditional
// Gaussians whose means differ by 1.0 between the classes (+-0.5 with a
// random sign per feature), the rest are independent standard normals.
// Informative positions are scattered by the seed and recorded in
// relevance_mask. Classes are balanced within one instance.
Dataset make_classification(std::size_t n_samples, std::size_t n_features,
                            std::size_t n_informative, std::uint64_t seed);

// Target column selector for load_csv: a header name or a 0-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

// Parses a header-first comma-separated file. Class ids are assigned by first
// appearance of each target token. Errors name the offending data row
// (1-based, header excluded) and column.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& target);

// Writes features followed by the target column; values use the shortest
// representation that round-trips exactly.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Single-column 0/1 file with header `relevant`.
void write_mask_csv(const std::vector<bool>& mask, const std::filesystem::path& path);
std::vector<bool> read_mask_csv(const std::filesystem::path& path);

}  // namespace attnrank
