#include "attnrank/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "attnrank/error.hpp"
#include "test_util.hpp"

namespace attnrank {
namespace {

std::vector<int> accuracy_labels(const LogRegModel& m, const Matrix& x) { return m.predict(x); }

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

Ranker fixed_ranker(std::vector<double> scores, std::string method = "fixed") {
  return [scores = std::move(scores), method = std::move(method)](const Dataset& d) {
    ImportanceVector iv;
    iv.scores = scores;
    iv.method = method;
    iv.feature_names = d.feature_names;
    return iv;
  };
}

TEST(LogReg, SeparableOneDimensional) {
  Matrix x(8, 1);
  x << -4, -3, -2, -1, 1, 2, 3, 4;
  std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  const auto m = train_logreg(x, y, 1.0);
  EXPECT_EQ(accuracy(accuracy_labels(m, x), y), 1.0);
  EXPECT_TRUE(m.weights.allFinite());
}

TEST(LogReg, ObjectiveDescends) {
  const auto d = testing::blobs(30, 4, 0.4, 2, 3);
  const auto m = train_logreg(d.features, d.labels, 1.0, 200);
  const double zero = logreg_objective(d.features, d.labels, 3, Matrix::Zero(3, 4), Vector::Zero(3), 1.0);
  EXPECT_LE(m.final_objective, zero);
  ASSERT_FALSE(m.objective_trace.empty());
  EXPECT_DOUBLE_EQ(m.objective_trace.front(), zero);
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
    EXPECT_LE(m.objective_trace[i], m.objective_trace[i - 1]);
  }
  EXPECT_DOUBLE_EQ(m.final_objective, logreg_objective(d.features, d.labels, 3, m.weights, m.bias, 1.0));
}

TEST(LogReg, StrongPenaltyShrinksWeights) {
  const auto d = testing::blobs(30, 3, 1.0, 5);
  const auto loose = train_logreg(d.features, d.labels, 1.0);
  const auto tight = train_logreg(d.features, d.labels, 1e-6);
  EXPECT_LT(tight.weights.norm(), loose.weights.norm());
  EXPECT_LT(tight.weights.norm(), 1e-3);
}

TEST(LogReg, Errors) {
  Matrix x = Matrix::Zero(3, 2);
  std::vector<int> one_class{0, 0, 0};
  EXPECT_THROW(train_logreg(x, one_class), InputError);
  std::vector<int> short_labels{0, 1};
  EXPECT_THROW(train_logreg(x, short_labels), DimensionError);
  std::vector<int> y{0, 1, 0};
  EXPECT_THROW(train_logreg(x, y, 0.0), ParameterError);
}

TEST(F1Macro, Examples) {
  std::vector<int> truth{1, 1, 0, 0};
  std::vector<int> same = truth;
  EXPECT_DOUBLE_EQ(f1_macro(same, truth), 1.0);
  std::vector<int> half{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(f1_macro(half, truth), 0.5);
  std::vector<int> ones{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(f1_macro(ones, truth), 1.0 / 3.0);
  // A third class that never occurs still counts in the mean.
  EXPECT_DOUBLE_EQ(f1_macro(same, truth, 3), 2.0 / 3.0);
  std::vector<int> shorter{1};
  EXPECT_THROW(f1_macro(shorter, truth), DimensionError);
  std::vector<int> none;
  EXPECT_THROW(f1_macro(none, none), DimensionError);
}

TEST(TopnSweep, FullCutoffIsBaseline) {
  const auto d = make_classification(120, 12, 4, 3);
  const auto folds = stratified_kfold(d, 3, 1);
  Rng rng(2);
  std::vector<double> scores(12);
  for (double& s : scores) s = rng.uniform();
  const auto curve = topn_sweep(d, fixed_ranker(scores), "fixed", {1, 6, 12}, folds);
  EXPECT_NEAR(curve.relative_f1.back(), 1.0, 1e-9);
  EXPECT_EQ(curve.method, "fixed");
  ASSERT_EQ(curve.per_fold_raw.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(curve.per_fold_raw[f].back(), curve.baseline_per_fold[f]);
}

TEST(TopnSweep, OracleBeatsAntiOracle) {
  const auto d = make_classification(300, 40, 10, 8);
  const auto folds = stratified_kfold(d, 3, 4);
  std::vector<double> oracle(40), anti(40);
  for (std::size_t j = 0; j < 40; ++j) {
    oracle[j] = (*d.relevance_mask)[j] ? 1.0 : 0.0;
    anti[j] = 1.0 - oracle[j];
  }
  const auto good = topn_sweep(d, fixed_ranker(oracle), "oracle", {10}, folds);
  const auto bad = topn_sweep(d, fixed_ranker(anti), "anti", {10}, folds);
  EXPECT_GE(good.relative_f1[0], bad.relative_f1[0]);
  EXPECT_GT(good.relative_f1[0], 0.9);
}

TEST(TopnSweep, ConstantRankerIsDeterministic) {
  const auto d = make_classification(90, 8, 3, 5);
  const auto folds = stratified_kfold(d, 3, 5);
  const auto a = topn_sweep(d, fixed_ranker(std::vector<double>(8, 1.0)), "c", {2, 3}, folds);
  const auto b = topn_sweep(d, fixed_ranker(std::vector<double>(8, 1.0)), "c", {2, 3}, folds);
  EXPECT_EQ(a.per_fold_raw, b.per_fold_raw);
  // Equal scores select the first n columns by index.
  const auto first = topn_sweep(d, fixed_ranker({3, 2, 1, 0, 0, 0, 0, 0}), "c", {2, 3}, folds);
  EXPECT_EQ(a.per_fold_raw, first.per_fold_raw);
}

TEST(TopnSweep, ThreadCountDoesNotChangeResults) {
  const auto d = make_classification(90, 8, 3, 6);
  const auto folds = stratified_kfold(d, 3, 6);
  RankerSpec spec;
  spec.method = Method::kMutualInfo;
  SweepOptions one, many;
  many.threads = 3;
  const auto a = topn_sweep(d, make_ranker(spec), "mutual_info", {1, 4, 8}, folds, one);
  const auto b = topn_sweep(d, make_ranker(spec), "mutual_info", {1, 4, 8}, folds, many);
  EXPECT_EQ(a.per_fold_raw, b.per_fold_raw);
  EXPECT_EQ(a.relative_f1, b.relative_f1);
}

TEST(TopnSweep, Errors) {
  const auto d = make_classification(60, 5, 2, 1);
  const auto folds = stratified_kfold(d, 3, 1);
  const auto r = fixed_ranker(std::vector<double>(5, 1.0));
  EXPECT_THROW(topn_sweep(d, r, "x", {6}, folds), ParameterError);
  EXPECT_THROW(topn_sweep(d, r, "x", {}, folds), ParameterError);
  EXPECT_THROW(topn_sweep(d, r, "x", {2, 2}, folds), ParameterError);
  EXPECT_THROW(topn_sweep(d, fixed_ranker({1, 2}), "x", {1}, folds), DimensionError);
  FoldPlan bad = folds;
  bad.assignments.pop_back();
  EXPECT_THROW(topn_sweep(d, r, "x", {1}, bad), DimensionError);
}

TEST(Leakage, TestLabelsNeverReachTheRanker) {
  const auto d = make_classification(90, 10, 4, 2);
  const auto folds = stratified_kfold(d, 3, 3);
  RankerSpec spec;
  spec.method = Method::kReliefF;
  const auto ranker = make_ranker(spec);
  const auto clean = fold_rankings(d, ranker, folds);
  for (int f = 0; f < 3; ++f) {
    Dataset shuffled = d;
    const auto test = folds.test_indices(f);
    std::vector<int> labels;
    for (std::size_t i : test) labels.push_back(d.labels[i]);
    Rng rng(static_cast<std::uint64_t>(f));
    rng.shuffle(labels);
    // Perturb the test features too; only training rows may matter.
    for (std::size_t k = 0; k < test.size(); ++k) {
      shuffled.labels[test[k]] = labels[k];
      shuffled.features.row(static_cast<Eigen::Index>(test[k])).array() += 100.0;
    }
    const auto dirty = fold_rankings(shuffled, ranker, folds);
    EXPECT_EQ(dirty[static_cast<std::size_t>(f)].scores, clean[static_cast<std::size_t>(f)].scores) << f;
  }
}

TEST(RunRanker, EveryMethodProducesOneScorePerFeature) {
  const auto d = make_classification(40, 6, 3, 9);
  for (Method m : all_methods()) {
    RankerSpec spec;
    spec.method = m;
    spec.san.epochs = 2;
    spec.san.hidden_dim = 8;
    spec.forest.n_trees = 5;
    const auto iv = run_ranker(d, spec);
    EXPECT_EQ(iv.scores.size(), 6u);
    EXPECT_EQ(iv.method, method_name(m));
    for (double s : iv.scores) EXPECT_GE(s, 0.0);
  }
}

TEST(InformativeColumns, CarryTheSignal) {
  const auto d = make_classification(400, 20, 5, 11);
  std::vector<std::size_t> informative, noise;
  for (std::size_t j = 0; j < 20; ++j) ((*d.relevance_mask)[j] ? informative : noise).push_back(j);
  auto score = [&](const std::vector<std::size_t>& cols) {
    const auto sub = select_features(d, cols);
    return accuracy(train_logreg(sub.features, sub.labels).predict(sub.features), sub.labels);
  };
  EXPECT_GT(score(informative), score(noise) + 0.1);
}

TEST(AttnDiff, CountsAndSimplexMeans) {
  AttnDiffOptions opt;
  opt.n_samples = 120;
  opt.n_features = 10;
  opt.n_informative = 4;
  opt.repetitions = 2;
  opt.folds = 3;
  SanConfig cfg;
  cfg.hidden_dim = 16;
  cfg.epochs = 4;
  const auto r = attention_difference_experiment(opt, cfg, 5);
  EXPECT_EQ(r.folds_total, 6u);
  EXPECT_LE(r.folds_used, r.folds_total);
  ASSERT_GT(r.folds_used, 0u);
  auto total = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  EXPECT_NEAR(total(r.mean_attention_positive), 1.0, 1e-9);
  EXPECT_NEAR(total(r.mean_attention_negative), 1.0, 1e-9);
  EXPECT_GE(r.relevant_mass_positive, 0.0);
  EXPECT_LE(r.relevant_mass_positive, 1.0);
  EXPECT_EQ(r.relevance_mask.size(), 10u);

  const auto again = attention_difference_experiment(opt, cfg, 5);
  EXPECT_EQ(again.mean_attention_positive, r.mean_attention_positive);
  opt.threads = 3;
  EXPECT_EQ(attention_difference_experiment(opt, cfg, 5).mean_attention_positive, r.mean_attention_positive);
}

TEST(AttnDiff, NoUsableFoldGivesEmptyMeans) {
  // All-zero features force a constant prediction; balanced test folds then
  // score exactly 0.5, which is not above the threshold.
  auto d = testing::label_copy_dataset(30, 3, 1);
  d.features.setZero();
  d.relevance_mask = std::vector<bool>{true, false, false, false};
  SanConfig cfg;
  cfg.hidden_dim = 4;
  cfg.epochs = 2;
  const auto r = attention_difference(d, 1, 3, cfg, 1);
  EXPECT_EQ(r.folds_used, 0u);
  EXPECT_EQ(r.folds_total, 3u);
  EXPECT_TRUE(r.mean_attention_positive.empty());
  EXPECT_TRUE(r.mean_attention_negative.empty());
  EXPECT_THROW(attention_difference(make_classification(30, 3, 1, 1), 0, 3, cfg, 1), ParameterError);
}

}  // namespace
}  // namespace attnrank
