#include "attnrank/ranking_compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "attnrank/error.hpp"

namespace attnrank {
namespace {

void check_pair(const ImportanceVector& a, const ImportanceVector& b) {
  if (a.scores.size() != b.scores.size()) {
    throw DimensionError(fmt::format("rankings cover {} and {} features", a.scores.size(), b.scores.size()));
  }
  if (!a.feature_names.empty() && !b.feature_names.empty() && a.feature_names != b.feature_names) {
    throw InputError("rankings are over different feature sets");
  }
}

void check_grid(const std::vector<int>& grid, std::size_t n_features) {
  if (grid.empty()) throw ParameterError("cutoff grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || static_cast<std::size_t>(grid[i]) > n_features) {
      throw ParameterError(fmt::format("cutoff {} outside [1, {}]", grid[i], n_features));
    }
    if (i > 0 && grid[i] <= grid[i - 1]) throw ParameterError("cutoff grid must be strictly increasing");
  }
}

// Memberships for every cutoff share one sort of the scores.
std::vector<double> memberships(const std::vector<double>& scores, const std::vector<std::size_t>& order,
                                std::size_t n) {
  std::vector<double> mu(scores.size(), 0.0);
  const double theta = scores[order[n - 1]];
  if (theta > 0.0) {
    for (std::size_t f = 0; f < scores.size(); ++f) mu[f] = std::min(1.0, scores[f] / theta);
  } else {
    for (std::size_t r = 0; r < n; ++r) mu[order[r]] = 1.0;
  }
  return mu;
}

double fuji_from_orders(const ImportanceVector& a, const std::vector<std::size_t>& order_a, const ImportanceVector& b,
                        const std::vector<std::size_t>& order_b, std::size_t n) {
  const auto mu_a = memberships(a.scores, order_a, n);
  const auto mu_b = memberships(b.scores, order_b, n);
  double lo = 0.0, hi = 0.0;
  for (std::size_t f = 0; f < mu_a.size(); ++f) {
    lo += std::min(mu_a[f], mu_b[f]);
    hi += std::max(mu_a[f], mu_b[f]);
  }
  return hi > 0.0 ? lo / hi : 1.0;
}

}  // namespace

double fuji_at_cutoff(const ImportanceVector& a, const ImportanceVector& b, std::size_t n) {
  check_pair(a, b);
  if (n < 1 || n > a.scores.size()) throw ParameterError(fmt::format("cutoff {} outside [1, {}]", n, a.scores.size()));
  return fuji_from_orders(a, ranking_order(a.scores), b, ranking_order(b.scores), n);
}

std::vector<int> default_cutoff_grid(std::size_t n_features) {
  std::vector<int> grid;
  const std::size_t dense = std::min<std::size_t>(n_features, 100);
  for (std::size_t i = 1; i <= dense; ++i) grid.push_back(static_cast<int>(i));
  if (n_features <= 100) return grid;
  constexpr double kPerDecade = 10.0;
  for (int step = 1;; ++step) {
    const auto c = static_cast<long long>(std::llround(100.0 * std::pow(10.0, step / kPerDecade)));
    if (c >= static_cast<long long>(n_features)) break;
    if (c > grid.back()) grid.push_back(static_cast<int>(c));
  }
  grid.push_back(static_cast<int>(n_features));
  return grid;
}

FujiCurve fuji_curve(const ImportanceVector& a, const ImportanceVector& b, const std::vector<int>& grid) {
  check_pair(a, b);
  FujiCurve curve;
  curve.cutoffs = grid.empty() ? default_cutoff_grid(a.scores.size()) : grid;
  check_grid(curve.cutoffs, a.scores.size());
  curve.ranking_a_method = a.method;
  curve.ranking_b_method = b.method;
  const auto order_a = ranking_order(a.scores);
  const auto order_b = ranking_order(b.scores);
  for (int n : curve.cutoffs) {
    curve.values.push_back(fuji_from_orders(a, order_a, b, order_b, static_cast<std::size_t>(n)));
  }
  return curve;
}

FujiCurve crisp_jaccard_curve(const ImportanceVector& a, const ImportanceVector& b, const std::vector<int>& grid) {
  check_pair(a, b);
  FujiCurve curve;
  curve.cutoffs = grid.empty() ? default_cutoff_grid(a.scores.size()) : grid;
  check_grid(curve.cutoffs, a.scores.size());
  curve.ranking_a_method = a.method;
  curve.ranking_b_method = b.method;
  const auto order_a = ranking_order(a.scores);
  const auto order_b = ranking_order(b.scores);
  std::vector<char> in_a(a.scores.size()), in_b(a.scores.size());
  for (int cutoff : curve.cutoffs) {
    const auto n = static_cast<std::size_t>(cutoff);
    std::fill(in_a.begin(), in_a.end(), 0);
    std::fill(in_b.begin(), in_b.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      in_a[order_a[r]] = 1;
      in_b[order_b[r]] = 1;
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t f = 0; f < in_a.size(); ++f) {
      inter += static_cast<std::size_t>(in_a[f] && in_b[f]);
      uni += static_cast<std::size_t>(in_a[f] || in_b[f]);
    }
    curve.values.push_back(static_cast<double>(inter) / static_cast<double>(uni));
  }
  return curve;
}

double simpson_auc(const FujiCurve& curve) {
  const auto& x = curve.cutoffs;
  const auto& y = curve.values;
  if (x.size() < 2 || x.size() != y.size()) throw ParameterError("Simpson area needs at least 2 matching points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] <= x[i - 1]) throw ParameterError("curve cutoffs must be strictly increasing");
  }
  double area = 0.0;
  std::size_t i = 0;
  for (; i + 2 < x.size(); i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double span = h0 + h1;
    area += span / 6.0 *
            ((2.0 - h1 / h0) * y[i] + span * span / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < x.size()) area += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return area / static_cast<double>(x.back() - x.front());
}

SimilarityMatrix similarity_matrix(const std::vector<ImportanceVector>& rankings, const std::vector<int>& grid) {
  if (rankings.size() < 2) throw ParameterError("similarity matrix needs at least 2 rankings");
  for (std::size_t i = 1; i < rankings.size(); ++i) check_pair(rankings[0], rankings[i]);
  const std::size_t m = rankings.size();
  SimilarityMatrix out;
  out.areas.assign(m, std::vector<double>(m, 1.0));
  for (const auto& r : rankings) out.methods.push_back(r.method);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double area = simpson_auc(fuji_curve(rankings[i], rankings[j], grid));
      out.areas[i][j] = area;
      out.areas[j][i] = area;
    }
  }
  return out;
}

SimilarityMatrix mean_similarity(const std::vector<SimilarityMatrix>& matrices) {
  if (matrices.empty()) throw ParameterError("no similarity matrices to average");
  SimilarityMatrix out = matrices.front();
  for (std::size_t k = 1; k < matrices.size(); ++k) {
    if (matrices[k].methods != out.methods) throw InputError("similarity matrices list different methods");
    for (std::size_t i = 0; i < out.areas.size(); ++i) {
      for (std::size_t j = 0; j < out.areas.size(); ++j) out.areas[i][j] += matrices[k].areas[i][j];
    }
  }
  for (auto& row : out.areas) {
    for (auto& v : row) v /= static_cast<double>(matrices.size());
  }
  return out;
}

void write_curve_csv(const FujiCurve& curve, const std::filesystem::path& path,
                     const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "# a={}\n# b={}\n", curve.ranking_a_method, curve.ranking_b_method);
  for (const auto& c : comments) fmt::format_to(it, "# {}\n", c);
  fmt::format_to(it, "cutoff,value\n");
  for (std::size_t i = 0; i < curve.cutoffs.size(); ++i) fmt::format_to(it, "{},{}\n", curve.cutoffs[i], curve.values[i]);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_similarity_csv(const SimilarityMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "method");
  for (const auto& m : matrix.methods) fmt::format_to(it, ",{}", m);
  fmt::format_to(it, "\n");
  for (std::size_t i = 0; i < matrix.methods.size(); ++i) {
    fmt::format_to(it, "{}", matrix.methods[i]);
    for (double v : matrix.areas[i]) fmt::format_to(it, ",{}", v);
    fmt::format_to(it, "\n");
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace attnrank
