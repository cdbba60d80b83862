#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attnrank {

// Ranking procedures known to the toolkit. The string forms are the public
// identifiers used in files and on the command line.
enum class Method {
  kAttention,          // "attention": mean instance attention
  kAttentionPositive,  // "attentionPositive": correctly predicted instances only (alias attentionClean)
  kAttentionGlobal,    // "attentionGlobal": softmax of the attention diagonal
  kAttentionGlobalRws, // "attentionGlobalRWS": diagonal of the row-wise softmax
  kReliefF,            // "relieff"
  kMutualInfo,         // "mutual_info"
  kRandomForest,       // "random_forest"
};

std::string_view method_name(Method m);

// Accepts every identifier above plus the "attentionClean" alias.
std::optional<Method> parse_method(std::string_view name);

const std::vector<Method>& all_methods();

bool is_attention_method(Method m);

// Non-negative per-feature scores produced by one ranker.
struct ImportanceVector {
  std::vector<double> scores;
  std::string method;
  std::vector<std::string> feature_names;
  // Free-form details recorded by the ranker (offsets, warnings, settings).
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return scores.size(); }
};

// Feature indices by descending score; ties go to the lower index.
std::vector<std::size_t> ranking_order(const std::vector<double>& scores);

// Indices of the n best features, in ranking order.
std::vector<std::size_t> top_n(const std::vector<double>& scores, std::size_t n);

// `feature,score,rank` rows in ranking order, rank starting at 1.
void write_importance_csv(const ImportanceVector& iv, const std::filesystem::path& path);

// Reads a `feature,score,rank` file. Features come back in file (ranking)
// order unless `feature_order` is given, in which case scores are aligned to
// it and the name sets must match. `method` is left empty.
ImportanceVector read_importance_csv(const std::filesystem::path& path,
                                     const std::vector<std::string>* feature_order = nullptr);

}  // namespace attnrank
