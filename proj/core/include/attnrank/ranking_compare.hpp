#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "attnrank/importance.hpp"

namespace attnrank {

// Similarity of two rankings as a function of the top-n cutoff.
struct FujiCurve {
  std::vector<int> cutoffs;   // strictly increasing
  std::vector<double> values;  // in [0, 1]
  std::string ranking_a_method;
  std::string ranking_b_method;
};

// Pairwise normalised areas under FUJI curves.
struct SimilarityMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> areas;  // symmetric, unit diagonal
};

// Fuzzy Jaccard index of the top-n sets. Membership of feature f in a
// ranking's top-n set is min(1, score(f) / theta_n), theta_n being the n-th
// largest score; when theta_n == 0 the crisp top-n set is used instead.
// Returns sum(min(mu_a, mu_b)) / sum(max(mu_a, mu_b)).
double fuji_at_cutoff(const ImportanceVector& a, const ImportanceVector& b, std::size_t n);

// Every cutoff 1..min(n_features, 100), then about ten log-spaced cutoffs per
// decade up to n_features (always included).
std::vector<int> default_cutoff_grid(std::size_t n_features);

// Empty grid selects default_cutoff_grid.
FujiCurve fuji_curve(const ImportanceVector& a, const ImportanceVector& b, const std::vector<int>& grid = {});

// |top_n(a) & top_n(b)| / |top_n(a) | top_n(b)| per cutoff (descending
// score, ties to the lower index).
FujiCurve crisp_jaccard_curve(const ImportanceVector& a, const ImportanceVector& b,
                              const std::vector<int>& grid = {});

// Composite Simpson's rule on the (possibly non-uniform) cutoff axis, one
// quadratic per pair of intervals, trapezoid on a leftover final interval.
// Normalised by the cutoff span so a constant curve integrates to its value.
double simpson_auc(const FujiCurve& curve);

SimilarityMatrix similarity_matrix(const std::vector<ImportanceVector>& rankings, const std::vector<int>& grid = {});

// Element-wise mean of matrices that share the same method list.
SimilarityMatrix mean_similarity(const std::vector<SimilarityMatrix>& matrices);

// `cutoff,value` rows preceded by `# a=<method>` and `# b=<method>` lines and
// any extra comment lines given.
void write_curve_csv(const FujiCurve& curve, const std::filesystem::path& path,
                     const std::vector<std::string>& comments = {});

// Header row `method,<m1>,<m2>,...`, then one row per method.
void write_similarity_csv(const SimilarityMatrix& matrix, const std::filesystem::path& path);

}  // namespace attnrank
