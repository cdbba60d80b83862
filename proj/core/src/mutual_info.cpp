#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "attnrank/baselines.hpp"
#include "attnrank/error.hpp"

namespace attnrank {

std::vector<int> equal_frequency_bins(const std::vector<double>& values, std::size_t n_bins) {
  if (n_bins < 2) throw ParameterError(fmt::format("n_bins must be >= 2, got {}", n_bins));
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<int> bins(n, 0);
  std::size_t group_start = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && values[order[r]] != values[order[r - 1]]) group_start = r;
    bins[order[r]] = static_cast<int>(group_start * n_bins / n);
  }
  return bins;
}

ImportanceVector mutual_information(const Dataset& data, std::size_t n_bins) {
  if (n_bins < 2) throw ParameterError(fmt::format("n_bins must be >= 2, got {}", n_bins));
  const std::size_t n = data.n_instances();
  const std::size_t n_classes = data.n_classes();
  const auto counts = data.class_counts();

  ImportanceVector iv;
  iv.method = std::string(method_name(Method::kMutualInfo));
  iv.feature_names = data.feature_names;
  iv.scores.assign(data.n_features(), 0.0);
  iv.metadata["n_bins"] = std::to_string(n_bins);
  iv.metadata["units"] = "bits";
  if (n == 0) return iv;

  const double total = static_cast<double>(n);
  std::vector<double> column(n);
  std::vector<std::size_t> table(n_bins * n_classes);
  std::vector<std::size_t> bin_totals(n_bins);
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const auto bins = equal_frequency_bins(column, n_bins);
    std::fill(table.begin(), table.end(), 0);
    std::fill(bin_totals.begin(), bin_totals.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++table[static_cast<std::size_t>(bins[i]) * n_classes + static_cast<std::size_t>(data.labels[i])];
      ++bin_totals[static_cast<std::size_t>(bins[i])];
    }
    double mi = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      for (std::size_t c = 0; c < n_classes; ++c) {
        const auto joint = table[b * n_classes + c];
        if (joint == 0) continue;
        const double p = static_cast<double>(joint) / total;
        mi += p * std::log2(static_cast<double>(joint) * total /
                            (static_cast<double>(bin_totals[b]) * static_cast<double>(counts[c])));
      }
    }
    iv.scores[j] = std::max(0.0, mi);
  }
  return iv;
}

}  // namespace attnrank
