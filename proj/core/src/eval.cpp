#include "attnrank/eval.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "parallel.hpp"

namespace attnrank {
namespace {

struct FoldData {
  Dataset train;
  Dataset test;
};

FoldData prepare_fold(const Dataset& data, const FoldPlan& folds, int fold, bool standardize_features,
                      bool need_test) {
  const auto train_idx = folds.train_indices(fold);
  FoldData out;
  out.train = select_rows(data, train_idx);
  if (need_test) out.test = select_rows(data, folds.test_indices(fold));
  if (standardize_features) {
    auto [train_std, params] = standardize(out.train);
    out.train = std::move(train_std);
    if (need_test) out.test = apply_standardization(out.test, params);
  }
  return out;
}

void check_plan(const Dataset& data, const FoldPlan& folds) {
  if (folds.assignments.size() != data.n_instances()) {
    throw DimensionError(fmt::format("fold plan covers {} instances, dataset has {}", folds.assignments.size(),
                                     data.n_instances()));
  }
  if (folds.n_folds < 2) throw ParameterError("fold plan needs at least 2 folds");
  for (int f : folds.assignments) {
    if (f < 0 || f >= folds.n_folds) throw ParameterError("fold id outside [0, n_folds)");
  }
}

double fold_f1(const FoldData& fd, const std::vector<std::size_t>& columns, const SweepOptions& options,
               std::size_t n_classes) {
  const Dataset train = select_features(fd.train, columns);
  const Dataset test = select_features(fd.test, columns);
  const auto model = train_logreg(train.features, train.labels, options.logreg_c, options.logreg_max_iters,
                                  options.logreg_tolerance, n_classes);
  return f1_macro(model.predict(test.features), test.labels, n_classes);
}

}  // namespace

ImportanceVector run_ranker(const Dataset& data, const RankerSpec& spec) {
  switch (spec.method) {
    case Method::kAttention:
      return importance_instance(train(data, spec.san), data);
    case Method::kAttentionPositive:
      return importance_instance_clean(train(data, spec.san), data);
    case Method::kAttentionGlobal:
      return importance_global(train(data, spec.san), data.feature_names);
    case Method::kAttentionGlobalRws:
      return importance_global_rws(train(data, spec.san), data.feature_names);
    case Method::kReliefF:
      return relieff(data, spec.relieff);
    case Method::kMutualInfo:
      return mutual_information(data, spec.mi_bins);
    case Method::kRandomForest:
      return random_forest_importance(data, spec.forest);
  }
  throw ParameterError("unknown ranking method");
}

Ranker make_ranker(const RankerSpec& spec) {
  return [spec](const Dataset& data) { return run_ranker(data, spec); };
}

std::vector<ImportanceVector> fold_rankings(const Dataset& data, const Ranker& ranker, const FoldPlan& folds,
                                            const SweepOptions& options) {
  check_plan(data, folds);
  std::vector<ImportanceVector> out(static_cast<std::size_t>(folds.n_folds));
  detail::parallel_for(out.size(), options.threads, [&](std::size_t f) {
    const auto fd = prepare_fold(data, folds, static_cast<int>(f), options.standardize, false);
    out[f] = ranker(fd.train);
  });
  return out;
}

EvalCurve topn_sweep(const Dataset& data, const Ranker& ranker, std::string method, const std::vector<int>& cutoffs,
                     const FoldPlan& folds, const SweepOptions& options) {
  check_plan(data, folds);
  if (cutoffs.empty()) throw ParameterError("cutoff grid is empty");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1 || static_cast<std::size_t>(cutoffs[i]) > data.n_features()) {
      throw ParameterError(fmt::format("cutoff {} outside [1, {}]", cutoffs[i], data.n_features()));
    }
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) throw ParameterError("cutoff grid must be strictly increasing");
  }

  const auto n_folds = static_cast<std::size_t>(folds.n_folds);
  const std::size_t n_classes = data.n_classes();
  EvalCurve curve;
  curve.method = std::move(method);
  curve.cutoffs = cutoffs;
  curve.per_fold_raw.assign(n_folds, std::vector<double>(cutoffs.size(), 0.0));
  curve.baseline_per_fold.assign(n_folds, 0.0);

  std::vector<std::size_t> all_columns(data.n_features());
  for (std::size_t j = 0; j < all_columns.size(); ++j) all_columns[j] = j;

  detail::parallel_for(n_folds, options.threads, [&](std::size_t f) {
    const auto fd = prepare_fold(data, folds, static_cast<int>(f), options.standardize, true);
    const auto ranking = ranker(fd.train);
    if (ranking.scores.size() != data.n_features()) {
      throw DimensionError(fmt::format("ranker returned {} scores for {} features", ranking.scores.size(),
                                       data.n_features()));
    }
    curve.baseline_per_fold[f] = fold_f1(fd, all_columns, options, n_classes);
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      auto columns = top_n(ranking.scores, static_cast<std::size_t>(cutoffs[c]));
      std::sort(columns.begin(), columns.end());
      curve.per_fold_raw[f][c] = fold_f1(fd, columns, options, n_classes);
    }
  });

  double baseline = 0.0;
  for (double v : curve.baseline_per_fold) baseline += v;
  baseline /= static_cast<double>(n_folds);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    double mean = 0.0;
    for (std::size_t f = 0; f < n_folds; ++f) mean += curve.per_fold_raw[f][c];
    mean /= static_cast<double>(n_folds);
    curve.relative_f1.push_back(baseline > 0.0 ? mean / baseline : 0.0);
  }
  return curve;
}

void write_eval_csv(const EvalCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "cutoff,relative_f1");
  for (std::size_t f = 0; f < curve.per_fold_raw.size(); ++f) fmt::format_to(it, ",fold_{}", f);
  fmt::format_to(it, "\n");
  for (std::size_t c = 0; c < curve.cutoffs.size(); ++c) {
    fmt::format_to(it, "{},{}", curve.cutoffs[c], curve.relative_f1[c]);
    for (const auto& fold : curve.per_fold_raw) fmt::format_to(it, ",{}", fold[c]);
    fmt::format_to(it, "\n");
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace attnrank
