#include "attnrank/importance.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "attnrank/error.hpp"

namespace attnrank {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kNames{{
    {Method::kAttention, "attention"},
    {Method::kAttentionPositive, "attentionPositive"},
    {Method::kAttentionGlobal, "attentionGlobal"},
    {Method::kAttentionGlobalRws, "attentionGlobalRWS"},
    {Method::kReliefF, "relieff"},
    {Method::kMutualInfo, "mutual_info"},
    {Method::kRandomForest, "random_forest"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kNames) {
    if (method == m) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "attentionClean") return Method::kAttentionPositive;
  for (const auto& [method, n] : kNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return methods;
}

bool is_attention_method(Method m) {
  return m == Method::kAttention || m == Method::kAttentionPositive || m == Method::kAttentionGlobal ||
         m == Method::kAttentionGlobalRws;
}

std::vector<std::size_t> ranking_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<std::size_t> top_n(const std::vector<double>& scores, std::size_t n) {
  auto order = ranking_order(scores);
  order.resize(std::min(n, order.size()));
  return order;
}

void write_importance_csv(const ImportanceVector& iv, const std::filesystem::path& path) {
  if (iv.feature_names.size() != iv.scores.size()) {
    throw DimensionError(fmt::format("importance vector has {} scores but {} feature names", iv.scores.size(),
                                     iv.feature_names.size()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "feature,score,rank\n");
  const auto order = ranking_order(iv.scores);
  for (std::size_t r = 0; r < order.size(); ++r) {
    fmt::format_to(std::back_inserter(buf), "{},{},{}\n", iv.feature_names[order[r]], iv.scores[order[r]], r + 1);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ImportanceVector read_importance_csv(const std::filesystem::path& path,
                                     const std::vector<std::string>* feature_order) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "feature,score,rank") {
    throw InputError(fmt::format("'{}' must start with the header 'feature,score,rank'", path.string()));
  }
  ImportanceVector iv;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty()) continue;
    ++row;
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw InputError(fmt::format("'{}' row {}: expected 3 cells", path.string(), row));
    }
    const auto name = trim(text.substr(0, c1));
    const auto score_text = trim(text.substr(c1 + 1, c2 - c1 - 1));
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size() || !std::isfinite(score)) {
      throw InputError(fmt::format("'{}' row {}: bad score '{}'", path.string(), row, score_text));
    }
    iv.feature_names.emplace_back(name);
    iv.scores.push_back(score);
  }
  if (feature_order == nullptr) return iv;

  if (feature_order->size() != iv.feature_names.size()) {
    throw InputError(fmt::format("'{}' has {} features, expected {}", path.string(), iv.feature_names.size(),
                                 feature_order->size()));
  }
  std::unordered_map<std::string, double> by_name;
  for (std::size_t i = 0; i < iv.feature_names.size(); ++i) by_name.emplace(iv.feature_names[i], iv.scores[i]);
  ImportanceVector aligned;
  aligned.feature_names = *feature_order;
  for (const auto& name : *feature_order) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw InputError(fmt::format("'{}' has no feature named '{}'", path.string(), name));
    }
    aligned.scores.push_back(it->second);
  }
  return aligned;
}

}  // namespace attnrank
