#include "attnrank/tabular.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "attnrank/error.hpp"
#include "test_util.hpp"

namespace attnrank {
namespace {

using testing::TempDir;
using testing::write_file;

TEST(LoadCsv, EncodesClassesByFirstAppearance) {
  TempDir dir;
  write_file(dir / "d.csv", "a,b,class\n1,2,pos\n3,4,neg\n5,6,pos\n");
  const auto d = load_csv(dir / "d.csv", std::string("class"));
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(d.n_instances(), 3u);
  EXPECT_EQ(d.n_classes(), 2u);
  EXPECT_EQ(d.class_names[0], "pos");
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(d.features(1, 1), 4.0);
}

TEST(LoadCsv, TargetByIndexAndFeatureOrderPreserved) {
  TempDir dir;
  write_file(dir / "d.csv", "y,z,a\nx,1,2\ny,3,4\r\n");
  const auto d = load_csv(dir / "d.csv", std::size_t{0});
  EXPECT_EQ(d.target_name, "y");
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"z", "a"}));
  EXPECT_DOUBLE_EQ(d.features(1, 1), 4.0);
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
  TempDir dir;
  std::ostringstream text;
  text << "a,b,class\n";
  for (int i = 1; i <= 9; ++i) text << (i == 7 ? "abc" : "1.5") << "," << i << "," << (i % 2 ? "p" : "n") << "\n";
  write_file(dir / "d.csv", text.str());
  try {
    load_csv(dir / "d.csv", std::string("class"));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, ErrorPaths) {
  TempDir dir;
  EXPECT_THROW(load_csv(dir / "missing.csv", std::string("class")), InputError);

  write_file(dir / "one_class.csv", "a,class\n1,p\n2,p\n");
  EXPECT_THROW(load_csv(dir / "one_class.csv", std::string("class")), InputError);

  write_file(dir / "one_row.csv", "a,class\n1,p\n");
  EXPECT_THROW(load_csv(dir / "one_row.csv", std::string("class")), InputError);

  write_file(dir / "ok.csv", "a,class\n1,p\n2,n\n");
  EXPECT_THROW(load_csv(dir / "ok.csv", std::string("label")), InputError);
  EXPECT_THROW(load_csv(dir / "ok.csv", std::size_t{5}), InputError);

  write_file(dir / "empty_cell.csv", "a,b,class\n1,,p\n2,3,n\n");
  EXPECT_THROW(load_csv(dir / "empty_cell.csv", std::string("class")), InputError);

  write_file(dir / "nan.csv", "a,class\nnan,p\n2,n\n");
  EXPECT_THROW(load_csv(dir / "nan.csv", std::string("class")), InputError);

  write_file(dir / "dup.csv", "a,a,class\n1,2,p\n2,3,n\n");
  EXPECT_THROW(load_csv(dir / "dup.csv", std::string("class")), InputError);
}

TEST(LoadCsv, MadelonShapedInput) {
  TempDir dir;
  std::string text;
  for (int j = 0; j < 500; ++j) text += "v" + std::to_string(j) + ",";
  text += "label\n";
  for (int i = 0; i < 4400; ++i) {
    for (int j = 0; j < 500; ++j) text += std::to_string((i * 31 + j * 7) % 997) + ",";
    text += (i % 2 ? "1\n" : "-1\n");
  }
  write_file(dir / "madelon.csv", text);
  const auto d = load_csv(dir / "madelon.csv", std::string("label"));
  EXPECT_EQ(d.n_features(), 500u);
  EXPECT_EQ(d.n_instances(), 4400u);
  EXPECT_EQ(d.n_classes(), 2u);
}

TEST(LoadCsv, WriteLoadRoundTrip) {
  TempDir dir;
  auto d = make_classification(50, 6, 3, 11);
  d.features(0, 0) = 0.1;
  d.features(1, 1) = -1e-300;
  d.features(2, 2) = 123456789.123456789;
  write_csv(d, dir / "d.csv");
  const auto back = load_csv(dir / "d.csv", std::string("class"));
  EXPECT_EQ(back.feature_names, d.feature_names);
  EXPECT_EQ(back.class_names, d.class_names);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_TRUE(back.features == d.features);

  write_mask_csv(*d.relevance_mask, dir / "mask.csv");
  EXPECT_EQ(read_mask_csv(dir / "mask.csv"), *d.relevance_mask);
  EXPECT_EQ(testing::read_file(dir / "mask.csv").substr(0, 9), "relevant\n");
}

TEST(Standardize, UnitColumnAndConstantColumn) {
  Dataset d;
  d.features.resize(3, 2);
  d.features << 1, 5, 2, 5, 3, 5;
  d.labels = {0, 1, 0};
  d.feature_names = {"a", "b"};
  d.class_names = {"x", "y"};
  const auto [s, params] = standardize(d);
  EXPECT_NEAR(s.features.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(s.features(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(s.features(2, 0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(params.std_devs(0), 1.0);
  EXPECT_EQ(params.std_devs(1), 0.0);
  EXPECT_TRUE(s.features.col(1).isZero(0.0));

  Dataset fresh = d;
  fresh.features.resize(1, 2);
  fresh.features << 10, 7;
  fresh.labels = {0};
  const auto applied = apply_standardization(fresh, params);
  EXPECT_DOUBLE_EQ(applied.features(0, 0), (10.0 - 2.0) / 1.0);
  EXPECT_EQ(applied.features(0, 1), 0.0);
}

TEST(Standardize, MomentsAndIdempotence) {
  const auto d = make_classification(200, 10, 4, 3);
  const auto [s, params] = standardize(d);
  for (Eigen::Index j = 0; j < s.features.cols(); ++j) {
    const auto col = s.features.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(col.size() - 1);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
  const auto again = standardize(s).first;
  EXPECT_LT((again.features - s.features).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Standardize, ApplyIdentityOwnMeansAndMismatch) {
  const auto d = make_classification(40, 5, 2, 9);
  StandardizationParams identity{Vector::Zero(5), Vector::Ones(5)};
  EXPECT_TRUE(apply_standardization(d, identity).features == d.features);

  StandardizationParams own{d.features.colwise().mean().transpose(), Vector::Ones(5)};
  const auto centred = apply_standardization(d, own);
  for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(centred.features.col(j).mean(), 0.0, 1e-12);

  StandardizationParams wrong{Vector::Zero(4), Vector::Ones(4)};
  EXPECT_THROW(apply_standardization(d, wrong), DimensionError);
}

TEST(StratifiedKFold, ExactDivisibility) {
  const auto d = testing::blobs(50, 2, 1.0, 1);
  const auto plan = stratified_kfold(d, 10, 42);
  for (int f = 0; f < 10; ++f) {
    int counts[2] = {0, 0};
    for (std::size_t i = 0; i < d.n_instances(); ++i) {
      if (plan.assignments[i] == f) ++counts[d.labels[i]];
    }
    EXPECT_EQ(counts[0], 5);
    EXPECT_EQ(counts[1], 5);
  }
  EXPECT_EQ(stratified_kfold(d, 10, 42).assignments, plan.assignments);
  EXPECT_NE(stratified_kfold(d, 10, 43).assignments, plan.assignments);
}

TEST(StratifiedKFold, TooFewMembers) {
  const auto d = testing::blobs(9, 2, 1.0, 1);
  EXPECT_THROW(stratified_kfold(d, 10, 0), ParameterError);
  EXPECT_THROW(stratified_kfold(d, 1, 0), ParameterError);
}

// Property: for random class sizes the per-fold count of every class is
// within one of proportional, and every fold id is used.
TEST(StratifiedKFold, StratificationProperty) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_folds = 2 + static_cast<int>(rng.below(9));
    const std::size_t n_classes = 2 + rng.below(3);
    Dataset d;
    std::vector<std::size_t> sizes;
    for (std::size_t c = 0; c < n_classes; ++c) {
      sizes.push_back(static_cast<std::size_t>(n_folds) + rng.below(40));
      for (std::size_t k = 0; k < sizes.back(); ++k) d.labels.push_back(static_cast<int>(c));
      d.class_names.push_back("c" + std::to_string(c));
    }
    d.features = Matrix::Zero(static_cast<Eigen::Index>(d.labels.size()), 1);
    d.feature_names = {"x"};
    const auto plan = stratified_kfold(d, n_folds, rng.next());
    std::vector<bool> used(static_cast<std::size_t>(n_folds), false);
    for (int f = 0; f < n_folds; ++f) {
      for (std::size_t c = 0; c < n_classes; ++c) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < d.labels.size(); ++i) {
          if (plan.assignments[i] == f && d.labels[i] == static_cast<int>(c)) ++count;
        }
        const double expected = static_cast<double>(sizes[c]) / n_folds;
        EXPECT_LE(std::abs(static_cast<double>(count) - expected), 1.0);
        if (count > 0) used[static_cast<std::size_t>(f)] = true;
      }
    }
    for (bool u : used) EXPECT_TRUE(u);
  }
}

TEST(MakeClassification, ShapeMaskAndBalance) {
  const auto d = make_classification(1000, 100, 50, 5);
  d.validate();
  EXPECT_EQ(d.n_instances(), 1000u);
  EXPECT_EQ(d.n_features(), 100u);
  ASSERT_TRUE(d.relevance_mask.has_value());
  EXPECT_EQ(std::count(d.relevance_mask->begin(), d.relevance_mask->end(), true), 50);
  const auto counts = d.class_counts();
  EXPECT_LE(std::abs(static_cast<long>(counts[0]) - static_cast<long>(counts[1])), 1);

  const auto all = make_classification(30, 7, 7, 1);
  EXPECT_EQ(std::count(all.relevance_mask->begin(), all.relevance_mask->end(), true), 7);
}

TEST(MakeClassification, DeterminismAndBounds) {
  const auto a = make_classification(100, 10, 5, 77);
  const auto b = make_classification(100, 10, 5, 77);
  const auto c = make_classification(100, 10, 5, 78);
  EXPECT_TRUE(a.features == b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_FALSE(a.features == c.features);
  EXPECT_THROW(make_classification(100, 10, 11, 0), ParameterError);
  EXPECT_THROW(make_classification(100, 10, 0, 0), ParameterError);
  EXPECT_THROW(make_classification(3, 10, 5, 0), ParameterError);
}

TEST(SelectRowsAndFeatures, KeepMetadata) {
  const auto d = make_classification(20, 6, 3, 2);
  const std::vector<std::size_t> rows{3, 1};
  const auto r = select_rows(d, rows);
  EXPECT_EQ(r.n_instances(), 2u);
  EXPECT_TRUE(r.features.row(0) == d.features.row(3));
  const std::vector<std::size_t> cols{5, 0};
  const auto c = select_features(d, cols);
  EXPECT_EQ(c.feature_names, (std::vector<std::string>{"f5", "f0"}));
  EXPECT_EQ((*c.relevance_mask)[0], (*d.relevance_mask)[5]);
}

}  // namespace
}  // namespace attnrank
