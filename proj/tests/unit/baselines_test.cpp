#include "attnrank/baselines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "attnrank/error.hpp"
#include "test_util.hpp"

namespace attnrank {
namespace {

// Brute-force ReliefF: full sort of every candidate list, scalar loops.
std::vector<double> naive_relieff(const Dataset& d, std::size_t k) {
  const std::size_t n = d.n_instances(), f = d.n_features(), classes = d.n_classes();
  std::vector<double> lo(f, 1e300), hi(f, -1e300);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      lo[j] = std::min(lo[j], d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      hi[j] = std::max(hi[j], d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  auto x = [&](std::size_t i, std::size_t j) {
    return d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto diff = [&](std::size_t j, std::size_t a, std::size_t b) {
    return hi[j] > lo[j] ? std::abs(x(a, j) - x(b, j)) / (hi[j] - lo[j]) : 0.0;
  };
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t j = 0; j < f; ++j) s += (x(a, j) - x(b, j)) * (x(a, j) - x(b, j));
    return s;
  };
  std::vector<double> count(classes, 0.0);
  for (int y : d.labels) count[static_cast<std::size_t>(y)] += 1.0;

  std::vector<double> w(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto yi = static_cast<std::size_t>(d.labels[i]);
    for (std::size_t c = 0; c < classes; ++c) {
      std::vector<std::pair<double, std::size_t>> cand;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && static_cast<std::size_t>(d.labels[j]) == c) cand.emplace_back(dist(i, j), j);
      }
      std::sort(cand.begin(), cand.end());
      const std::size_t kk = std::min(k, cand.size());
      const double scale = c == yi ? -1.0 : (count[c] / static_cast<double>(n)) / (1.0 - count[yi] / static_cast<double>(n));
      for (std::size_t r = 0; r < kk; ++r) {
        for (std::size_t j = 0; j < f; ++j) {
          w[j] += scale * diff(j, i, cand[r].second) / (static_cast<double>(n) * static_cast<double>(kk));
        }
      }
    }
  }
  const double mn = *std::min_element(w.begin(), w.end());
  for (double& v : w) v -= mn;
  return w;
}

// Plug-in MI from explicit joint counts.
double naive_mi(const std::vector<int>& bins, const std::vector<int>& labels) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pb, py;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    joint[{bins[i], labels[i]}] += 1;
    pb[bins[i]] += 1;
    py[labels[i]] += 1;
  }
  const double n = static_cast<double>(bins.size());
  double mi = 0;
  for (const auto& [key, c] : joint) mi += c / n * std::log2(c * n / (pb[key.first] * py[key.second]));
  return mi;
}

Dataset random_multiclass(std::size_t n, std::size_t f, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % classes);
    d.labels.push_back(y);
    for (std::size_t j = 0; j < f; ++j) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal() + (j < 2 ? y : 0);
    }
  }
  for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("v" + std::to_string(j));
  for (std::size_t c = 0; c < classes; ++c) d.class_names.push_back("k" + std::to_string(c));
  return d;
}

Dataset with_duplicate_column(const Dataset& d, std::size_t col) {
  std::vector<std::size_t> cols(d.n_features());
  std::iota(cols.begin(), cols.end(), 0);
  cols.push_back(col);
  Dataset out = select_features(d, cols);
  out.feature_names.back() += "_dup";
  return out;
}

TEST(ReliefF, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto d = random_multiclass(30 + seed, 5, 2 + seed % 3, seed);
    const std::size_t k = 1 + seed % 4;
    const auto iv = relieff(d, {.n_neighbors = k});
    const auto ref = naive_relieff(d, k);
    for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(iv.scores[j], ref[j], 1e-12) << "seed " << seed;
    EXPECT_EQ(*std::min_element(iv.scores.begin(), iv.scores.end()), 0.0);
  }
}

TEST(ReliefF, LabelCopyRanksFirst) {
  const auto d = testing::label_copy_dataset(60, 5, 3);
  const auto iv = relieff(d);
  EXPECT_EQ(ranking_order(iv.scores)[0], 0u);
  EXPECT_EQ(iv.method, "relieff");
  EXPECT_TRUE(iv.metadata.count("offset"));
}

TEST(ReliefF, DuplicatedColumnsScoreEqually) {
  const auto d = with_duplicate_column(random_multiclass(40, 4, 2, 1), 1);
  const auto iv = relieff(d);
  EXPECT_DOUBLE_EQ(iv.scores[1], iv.scores[4]);
}

TEST(ReliefF, AddingNoiseKeepsRelevantFeatureFirst) {
  for (std::size_t noise : {2u, 10u, 30u}) {
    const auto d = testing::label_copy_dataset(80, noise, 7);
    EXPECT_EQ(ranking_order(relieff(d).scores)[0], 0u) << noise;
  }
}

TEST(ReliefF, SmallClassWarnsAndTinyClassFails) {
  auto d = testing::label_copy_dataset(30, 2, 1);
  // Shrink class 1 to three instances.
  std::vector<std::size_t> rows;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < d.n_instances(); ++i) {
    if (d.labels[i] == 0 || ones++ < 3) rows.push_back(i);
  }
  const auto small = select_rows(d, rows);
  const auto iv = relieff(small, {.n_neighbors = 10});
  ASSERT_TRUE(iv.metadata.count("warnings"));
  EXPECT_NE(iv.metadata.at("warnings").find("pos"), std::string::npos);

  rows.clear();
  ones = 0;
  for (std::size_t i = 0; i < d.n_instances(); ++i) {
    if (d.labels[i] == 0 || ones++ < 1) rows.push_back(i);
  }
  EXPECT_THROW(relieff(select_rows(d, rows)), InputError);
  EXPECT_THROW(relieff(d, {.n_neighbors = 0}), ParameterError);
}

TEST(ReliefF, SampledReferencesAreDeterministic) {
  const auto d = random_multiclass(50, 4, 2, 2);
  const auto a = relieff(d, {.n_neighbors = 3, .sample_size = 20, .seed = 4});
  const auto b = relieff(d, {.n_neighbors = 3, .sample_size = 20, .seed = 4});
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.metadata.at("reference_points"), "20");
}

TEST(EqualFrequencyBins, Examples) {
  EXPECT_EQ(equal_frequency_bins({4, 3, 2, 1}, 2), (std::vector<int>{1, 1, 0, 0}));
  EXPECT_EQ(equal_frequency_bins({5, 5, 5, 5}, 4), (std::vector<int>{0, 0, 0, 0}));
  const auto b = equal_frequency_bins({1, 2, 2, 2, 3, 4}, 3);
  EXPECT_EQ(b[1], b[2]);
  EXPECT_EQ(b[2], b[3]);
  EXPECT_THROW(equal_frequency_bins({1, 2}, 1), ParameterError);
}

TEST(MutualInfo, LabelCopyIsOneBit) {
  const auto d = testing::label_copy_dataset(60, 3, 1);
  const auto iv = mutual_information(d, 10);
  EXPECT_NEAR(iv.scores[0], 1.0, 1e-9);
  EXPECT_EQ(ranking_order(iv.scores)[0], 0u);
  EXPECT_EQ(iv.method, "mutual_info");
}

TEST(MutualInfo, MatchesJointCountOracle) {
  const auto d = random_multiclass(97, 4, 3, 9);
  const auto iv = mutual_information(d, 7);
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> col(d.n_instances());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    EXPECT_NEAR(iv.scores[j], naive_mi(equal_frequency_bins(col, 7), d.labels), 1e-12);
  }
}

TEST(MutualInfo, IndependentNoiseIsSmall) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = testing::label_copy_dataset(1000, 1, seed);
    EXPECT_LT(mutual_information(d, 10).scores[1], 0.05) << seed;
  }
}

TEST(MutualInfo, ConstantPermutedAndDuplicated) {
  auto d = testing::label_copy_dataset(40, 2, 5);
  d.features.col(2).setConstant(3.0);
  const auto iv = mutual_information(d);
  EXPECT_EQ(iv.scores[2], 0.0);

  std::vector<std::size_t> perm(d.n_instances());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(3);
  rng.shuffle(perm);
  const auto shuffled = mutual_information(select_rows(d, perm));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(shuffled.scores[j], iv.scores[j], 1e-12);

  const auto dup = mutual_information(with_duplicate_column(d, 1));
  EXPECT_DOUBLE_EQ(dup.scores[1], dup.scores[3]);
  EXPECT_THROW(mutual_information(d, 1), ParameterError);
}

TEST(RandomForest, LabelCopyRanksFirst) {
  const auto d = testing::label_copy_dataset(60, 5, 2);
  const auto iv = random_forest_importance(d, {.n_trees = 50, .seed = 1});
  EXPECT_EQ(ranking_order(iv.scores)[0], 0u);
  EXPECT_EQ(iv.method, "random_forest");
}

TEST(RandomForest, ConstantFeatureOnlyGivesZeros) {
  Dataset d;
  d.features = Matrix::Constant(10, 1, 2.0);
  for (int i = 0; i < 10; ++i) d.labels.push_back(i % 2);
  d.feature_names = {"c"};
  d.class_names = {"a", "b"};
  const auto iv = random_forest_importance(d, {.n_trees = 5});
  EXPECT_EQ(iv.scores, std::vector<double>{0.0});
}

TEST(RandomForest, DeterministicAndThreadIndependent) {
  const auto d = random_multiclass(60, 6, 3, 4);
  const auto a = random_forest_importance(d, {.n_trees = 20, .seed = 9, .threads = 1});
  const auto b = random_forest_importance(d, {.n_trees = 20, .seed = 9, .threads = 1});
  const auto c = random_forest_importance(d, {.n_trees = 20, .seed = 9, .threads = 4});
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.scores, c.scores);
  const auto other = random_forest_importance(d, {.n_trees = 20, .seed = 10});
  EXPECT_NE(a.scores, other.scores);
}

TEST(RandomForest, DuplicatedColumnsShareImportance) {
  // Averaged over seeds the copies split the credit roughly evenly.
  double first = 0, second = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = with_duplicate_column(random_multiclass(80, 3, 2, seed), 0);
    const auto iv = random_forest_importance(d, {.n_trees = 50, .seed = seed});
    first += iv.scores[0];
    second += iv.scores[3];
  }
  EXPECT_NEAR(first / second, 1.0, 0.1);
}

TEST(RandomForest, ImportancesAreNonNegativeAndBounded) {
  const auto d = random_multiclass(60, 5, 3, 6);
  const auto forest = fit_forest(d, {.n_trees = 10, .seed = 2});
  double total = 0;
  for (double v : forest.importances) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  // Total decrease cannot exceed the root impurity 1 - sum p_c^2 <= 1.
  EXPECT_LE(total, 1.0);
}

TEST(PredictForest, Examples) {
  const auto sep = testing::blobs(40, 3, 2.0, 1);
  const auto pred = predict_forest(sep, {.n_trees = 1, .seed = 3}, sep);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == sep.labels[i];
  EXPECT_GT(static_cast<double>(ok) / static_cast<double>(pred.size()), 0.95);

  auto single = testing::blobs(10, 2, 1.0, 2);
  std::fill(single.labels.begin(), single.labels.end(), 1);
  for (int p : predict_forest(single, {.n_trees = 3}, single)) EXPECT_EQ(p, 1);

  EXPECT_THROW(fit_forest(sep, {.n_trees = 0}), ParameterError);
}

}  // namespace
}  // namespace attnrank
