#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/eval.hpp"
#include "parallel.hpp"

namespace attnrank {
namespace {

constexpr std::uint64_t kFoldPlanStream = 1;
constexpr std::uint64_t kCellStreamBase = 1000;

struct CellResult {
  bool used = false;
  Vector positive_sum;
  Vector negative_sum;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
};

}  // namespace

AttnDiffReport attention_difference(const Dataset& data, std::size_t repetitions, int folds, const SanConfig& config,
                                    std::uint64_t seed, bool standardize_features, std::size_t threads) {
  if (data.n_classes() != 2) throw InputError("the attention difference protocol needs a binary dataset");
  if (repetitions == 0) throw ParameterError("repetitions must be positive");

  std::vector<FoldPlan> plans;
  for (std::size_t r = 0; r < repetitions; ++r) {
    plans.push_back(stratified_kfold(data, folds, derive_seed(derive_seed(seed, kFoldPlanStream), r)));
  }
  const std::size_t n_cells = repetitions * static_cast<std::size_t>(folds);
  const auto f = static_cast<Eigen::Index>(data.n_features());
  std::vector<CellResult> cells(n_cells);

  detail::parallel_for(n_cells, threads, [&](std::size_t cell) {
    const auto& plan = plans[cell / static_cast<std::size_t>(folds)];
    const int fold = static_cast<int>(cell % static_cast<std::size_t>(folds));
    Dataset train_part = select_rows(data, plan.train_indices(fold));
    Dataset test_part = select_rows(data, plan.test_indices(fold));
    if (standardize_features) {
      auto [train_std, params] = standardize(train_part);
      train_part = std::move(train_std);
      test_part = apply_standardization(test_part, params);
    }
    SanConfig cell_config = config;
    cell_config.seed = derive_seed(derive_seed(seed, config.seed), kCellStreamBase + cell);
    const auto model = train(train_part, cell_config);

    const auto predicted = predict(model, test_part.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test_part.labels[i] ? 1 : 0;
    const double accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());

    CellResult& out = cells[cell];
    out.positive_sum = Vector::Zero(f);
    out.negative_sum = Vector::Zero(f);
    if (!(accuracy > 0.5)) return;
    out.used = true;
    const Matrix att = attention_batch(model, test_part.features);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] != test_part.labels[i]) continue;
      if (test_part.labels[i] == 1) {
        out.positive_sum += att.row(static_cast<Eigen::Index>(i)).transpose();
        ++out.positive_count;
      } else {
        out.negative_sum += att.row(static_cast<Eigen::Index>(i)).transpose();
        ++out.negative_count;
      }
    }
  });

  AttnDiffReport report;
  report.folds_total = n_cells;
  report.feature_names = data.feature_names;
  if (data.relevance_mask) report.relevance_mask = *data.relevance_mask;
  Vector positive = Vector::Zero(f);
  Vector negative = Vector::Zero(f);
  for (const auto& c : cells) {
    if (!c.used) continue;
    ++report.folds_used;
    positive += c.positive_sum;
    negative += c.negative_sum;
    report.instances_positive += c.positive_count;
    report.instances_negative += c.negative_count;
  }

  auto finish = [&](const Vector& sum, std::size_t count, std::vector<double>& mean, double& mass) {
    if (count == 0) return;
    const Vector m = sum / static_cast<double>(count);
    mean.assign(m.data(), m.data() + m.size());
    mass = 0.0;
    for (std::size_t j = 0; j < mean.size() && j < report.relevance_mask.size(); ++j) {
      if (report.relevance_mask[j]) mass += mean[j];
    }
  };
  finish(positive, report.instances_positive, report.mean_attention_positive, report.relevant_mass_positive);
  finish(negative, report.instances_negative, report.mean_attention_negative, report.relevant_mass_negative);
  return report;
}

AttnDiffReport attention_difference_experiment(const AttnDiffOptions& options, const SanConfig& config,
                                               std::uint64_t seed) {
  const Dataset data = make_classification(options.n_samples, options.n_features, options.n_informative, seed);
  return attention_difference(data, options.repetitions, options.folds, config, derive_seed(seed, 7),
                              options.standardize, options.threads);
}

}  // namespace attnrank
