#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "attnrank/baselines.hpp"
#include "attnrank/importance.hpp"
#include "attnrank/san.hpp"
#include "attnrank/tabular.hpp"

namespace attnrank {

// Multinomial logistic regression with an L2 penalty on the weights.
struct LogRegModel {
  Matrix weights;  // n_classes x n_features
  Vector bias;     // n_classes
  double regularization_c = 1.0;
  std::size_t iterations = 0;
  double final_objective = 0.0;
  // Objective after every accepted step, starting with the initial point.
  std::vector<double> objective_trace;

  std::vector<int> predict(const Matrix& features) const;
};

// mean cross-entropy + ||W||^2 / (2 c n); the bias is not penalised.
double logreg_objective(const Matrix& features, std::span<const int> labels, std::size_t n_classes,
                        const Matrix& weights, const Vector& bias, double c);

// Full-batch gradient descent with Armijo backtracking from a zero start.
// Stops when the gradient norm drops below `tolerance` or after max_iters.
// n_classes == 0 infers it from the labels.
LogRegModel train_logreg(const Matrix& features, std::span<const int> labels, double c = 1.0,
                         std::size_t max_iters = 500, double tolerance = 1e-6, std::size_t n_classes = 0);

// Unweighted mean of per-class F1 over classes 0..n_classes-1. A class absent
// from both truth and predictions contributes 0. n_classes == 0 infers
// max label + 1.
double f1_macro(std::span<const int> predictions, std::span<const int> truth, std::size_t n_classes = 0);

// A ranking procedure applied to a (training) dataset.
using Ranker = std::function<ImportanceVector(const Dataset&)>;

// Parameters for every built-in method; only the ones the chosen method
// uses are read.
struct RankerSpec {
  Method method = Method::kMutualInfo;
  SanConfig san;
  ReliefFParams relieff;
  ForestParams forest;
  std::size_t mi_bins = 10;
};

// SAN-based methods train on the given dataset, then extract. Instance
// extractors aggregate over that same dataset.
ImportanceVector run_ranker(const Dataset& data, const RankerSpec& spec);
Ranker make_ranker(const RankerSpec& spec);

struct SweepOptions {
  bool standardize = true;
  double logreg_c = 1.0;
  std::size_t logreg_max_iters = 500;
  double logreg_tolerance = 1e-6;
  // Folds evaluated concurrently; 0 picks the hardware concurrency.
  std::size_t threads = 1;
};

// Rankings computed on each fold's training portion (standardised with
// parameters fitted on that portion when requested). The test portion is
// never read.
std::vector<ImportanceVector> fold_rankings(const Dataset& data, const Ranker& ranker, const FoldPlan& folds,
                                            const SweepOptions& options = {});

struct EvalCurve {
  std::vector<int> cutoffs;
  std::vector<double> relative_f1;
  std::string method;
  std::vector<std::vector<double>> per_fold_raw;  // folds x cutoffs, macro F1
  std::vector<double> baseline_per_fold;          // all-features macro F1 per fold
};

// Top-n evaluation: per fold, fit standardisation and the ranker on the
// training portion, train logistic regression on the top-n features and
// score macro F1 on the test portion. relative_f1 is the fold mean of top-n
// F1 over the fold mean of the all-features F1. Selected columns keep their
// original order, so the cutoff n_features reproduces the baseline exactly.
EvalCurve topn_sweep(const Dataset& data, const Ranker& ranker, std::string method, const std::vector<int>& cutoffs,
                     const FoldPlan& folds, const SweepOptions& options = {});

// `cutoff,relative_f1,fold_0,...` rows.
void write_eval_csv(const EvalCurve& curve, const std::filesystem::path& path);

struct AttnDiffReport {
  std::vector<double> mean_attention_positive;  // empty when nothing was aggregated
  std::vector<double> mean_attention_negative;
  std::size_t folds_used = 0;
  std::size_t folds_total = 0;
  std::size_t instances_positive = 0;
  std::size_t instances_negative = 0;
  double relevant_mass_positive = 0.0;
  double relevant_mass_negative = 0.0;
  std::vector<bool> relevance_mask;
  std::vector<std::string> feature_names;
};

struct AttnDiffOptions {
  std::size_t n_samples = 1000;
  std::size_t n_features = 100;
  std::size_t n_informative = 50;
  std::size_t repetitions = 3;
  int folds = 3;
  bool standardize = true;
  // Fold cells trained concurrently; 0 picks the hardware concurrency.
  std::size_t threads = 1;
};

// Repeated stratified CV on make_classification data. For every fold whose
// test accuracy exceeds 0.5, attention vectors of correctly predicted test
// instances are accumulated per true class (class 1 positive, class 0
// negative). Means are over all accumulated instances.
AttnDiffReport attention_difference_experiment(const AttnDiffOptions& options, const SanConfig& config,
                                               std::uint64_t seed);

// Same protocol on an arbitrary binary dataset with a relevance mask.
AttnDiffReport attention_difference(const Dataset& data, std::size_t repetitions, int folds, const SanConfig& config,
                                    std::uint64_t seed, bool standardize = true, std::size_t threads = 1);

}  // namespace attnrank
