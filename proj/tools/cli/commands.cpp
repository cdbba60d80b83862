#include "commands.hpp"

#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/ranking_compare.hpp"
#include "attnrank/version.hpp"
#include "json.hpp"

namespace attnrank::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json san_json(const SanConfig& c) {
  return {{"hidden_dim", c.hidden_dim},       {"epochs", c.epochs},     {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate}, {"dropout", c.dropout_rate}, {"heads", c.n_heads}};
}

json method_params(Method m, const RankerSpec& spec) {
  switch (m) {
    case Method::kAttention:
    case Method::kAttentionPositive:
    case Method::kAttentionGlobal:
    case Method::kAttentionGlobalRws:
      return san_json(spec.san);
    case Method::kReliefF:
      return {{"neighbors", spec.relieff.n_neighbors}, {"sample_size", optional_json(spec.relieff.sample_size)}};
    case Method::kMutualInfo:
      return {{"bins", spec.mi_bins}};
    case Method::kRandomForest:
      return {{"trees", spec.forest.n_trees},
              {"max_features", optional_json(spec.forest.max_features_per_split)},
              {"min_leaf", spec.forest.min_leaf_size}};
  }
  return json::object();
}

Method require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ParameterError(fmt::format("unknown method '{}'", name));
  return *m;
}

RankerSpec seeded(RankerSpec spec, Method m, std::uint64_t seed, std::size_t threads) {
  spec.method = m;
  spec.san.seed = seed;
  spec.relieff.seed = seed;
  spec.forest.seed = seed;
  spec.forest.threads = threads;
  return spec;
}

Dataset load(const DatasetArgs& a) {
  ColumnRef target = a.target;
  if (a.target_index) target = *a.target_index;
  return load_csv(a.input, target);
}

json dataset_json(const DatasetArgs& a) {
  json j = {{"input", a.input.generic_string()}, {"standardize", a.standardize}};
  if (a.target_index) {
    j["target_index"] = *a.target_index;
  } else {
    j["target"] = a.target;
  }
  return j;
}

// A ranking file plus the label it is reported under: the method recorded in
// its sidecar if one exists, otherwise the file stem.
struct LoadedRanking {
  fs::path path;
  ImportanceVector iv;
};

std::vector<LoadedRanking> load_rankings(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw ParameterError("no ranking files given");
  std::vector<LoadedRanking> out;
  for (const auto& p : paths) {
    LoadedRanking r{p, {}};
    try {
      r.iv = out.empty() ? read_importance_csv(p) : read_importance_csv(p, &out.front().iv.feature_names);
    } catch (const InputError& e) {
      if (out.empty()) throw;
      throw InputError(fmt::format("'{}' and '{}' rank different features: {}", out.front().path.string(),
                                   p.string(), e.what()));
    }
    r.iv.method = p.stem().string();
    const auto sidecar = sidecar_path(p);
    if (fs::exists(sidecar)) {
      std::ifstream in(sidecar, std::ios::binary);
      const json j = json::parse(in, nullptr, false);
      if (j.is_object() && j.contains("method") && j["method"].is_string()) r.iv.method = j["method"];
    }
    out.push_back(std::move(r));
  }
  // Keep labels unique so curve file names cannot collide.
  std::map<std::string, int> seen;
  for (auto& r : out) {
    const int k = seen[r.iv.method]++;
    if (k > 0) r.iv.method += fmt::format("_{}", k + 1);
  }
  return out;
}

SimilarityMatrix compare_set(const std::vector<LoadedRanking>& set, const std::vector<int>& cutoffs,
                             const fs::path& dir) {
  fs::create_directories(dir);
  const std::vector<std::string> note = {
      "fuzzy jaccard: membership min(1, score / nth largest score), crisp top-n when that score is 0"};
  SimilarityMatrix matrix;
  if (set.size() == 1) {
    matrix.methods = {set[0].iv.method};
    matrix.areas = {{1.0}};
  } else {
    std::vector<ImportanceVector> rankings;
    for (const auto& r : set) rankings.push_back(r.iv);
    matrix = similarity_matrix(rankings, cutoffs);
    for (std::size_t i = 0; i < rankings.size(); ++i) {
      for (std::size_t j = i + 1; j < rankings.size(); ++j) {
        const auto stem = fmt::format("{}__{}", rankings[i].method, rankings[j].method);
        auto comments = note;
        comments.push_back(fmt::format("area={}", matrix.areas[i][j]));
        write_curve_csv(fuji_curve(rankings[i], rankings[j], cutoffs), dir / ("fuji_" + stem + ".csv"), comments);
        write_curve_csv(crisp_jaccard_curve(rankings[i], rankings[j], cutoffs), dir / ("jaccard_" + stem + ".csv"));
      }
    }
  }
  write_similarity_csv(matrix, dir / "similarity.csv");
  return matrix;
}

}  // namespace

fs::path sidecar_path(const fs::path& file) { return fs::path(file.string() + ".json"); }

void run_rank(const RankArgs& args) {
  const Method method = require_method(args.method);
  Dataset data = load(args.data);
  if (args.data.standardize) data = standardize(data).first;
  const auto spec = seeded(args.spec, method, args.data.seed, args.data.threads);
  const auto iv = run_ranker(data, spec);

  ensure_parent(args.out);
  write_importance_csv(iv, args.out);
  json meta = json::object();
  for (const auto& [k, v] : iv.metadata) meta[k] = v;
  write_json({{"command", "rank"},
              {"method", method_name(method)},
              {"params", method_params(method, spec)},
              {"dataset", dataset_json(args.data)},
              {"seed", args.data.seed},
              {"metadata", meta},
              {"version", kVersion}},
             sidecar_path(args.out));
}

void run_compare(const CompareArgs& args) {
  fs::create_directories(args.out_dir);
  json sidecar = {{"command", "compare"}, {"version", kVersion}, {"cutoffs", args.cutoffs.empty() ? json("default") : json(args.cutoffs)}};

  if (args.manifest.empty()) {
    const auto set = load_rankings(args.rankings);
    compare_set(set, args.cutoffs, args.out_dir);
    json files = json::array();
    for (const auto& r : set) files.push_back({{"file", r.path.generic_string()}, {"label", r.iv.method}});
    sidecar["rankings"] = files;
    write_json(sidecar, args.out_dir / "compare.json");
    return;
  }

  // Manifest: {"datasets": [{"name": ..., "rankings": [paths relative to the manifest]}]}
  std::ifstream in(args.manifest, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read manifest '{}'", args.manifest.string()));
  const json manifest = json::parse(in, nullptr, false);
  if (!manifest.is_object() || !manifest.contains("datasets") || !manifest["datasets"].is_array() ||
      manifest["datasets"].empty()) {
    throw InputError(fmt::format("manifest '{}' needs a non-empty \"datasets\" array", args.manifest.string()));
  }
  const fs::path base = args.manifest.parent_path();
  std::vector<SimilarityMatrix> matrices;
  std::set<std::string> names;
  json datasets = json::array();
  for (const auto& entry : manifest["datasets"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() || !entry.contains("rankings") ||
        !entry["rankings"].is_array()) {
      throw InputError("each manifest dataset needs a \"name\" string and a \"rankings\" array");
    }
    const std::string name = entry["name"];
    if (!names.insert(name).second) throw InputError(fmt::format("dataset '{}' listed twice in the manifest", name));
    std::vector<fs::path> paths;
    for (const auto& p : entry["rankings"]) {
      if (!p.is_string()) throw InputError(fmt::format("dataset '{}': ranking paths must be strings", name));
      const fs::path rel = p.get<std::string>();
      paths.push_back(rel.is_absolute() ? rel : base / rel);
    }
    const auto set = load_rankings(paths);
    matrices.push_back(compare_set(set, args.cutoffs, args.out_dir / name));
    json files = json::array();
    for (const auto& r : set) files.push_back({{"file", r.path.generic_string()}, {"label", r.iv.method}});
    datasets.push_back({{"name", name}, {"rankings", files}});
  }
  write_similarity_csv(mean_similarity(matrices), args.out_dir / "similarity_mean.csv");
  sidecar["manifest"] = args.manifest.generic_string();
  sidecar["datasets"] = datasets;
  write_json(sidecar, args.out_dir / "compare.json");
}

void run_evaluate(const EvaluateArgs& args) {
  if (args.methods.empty()) throw ParameterError("no methods given");
  // Resolve every name before any training starts.
  std::vector<Method> methods;
  for (const auto& name : args.methods) methods.push_back(require_method(name));

  Dataset data = load(args.data);
  const auto folds = stratified_kfold(data, args.folds, args.data.seed);
  const auto cutoffs = args.cutoffs.empty() ? default_cutoff_grid(data.n_features()) : args.cutoffs;
  SweepOptions options;
  options.standardize = args.data.standardize;
  options.logreg_c = args.logreg_c;
  options.logreg_max_iters = args.logreg_max_iters;
  options.threads = args.data.threads;

  fs::create_directories(args.out_dir);
  json per_method = json::object();
  for (Method m : methods) {
    // Forest threads stay at 1; the sweep already parallelises over folds.
    const auto spec = seeded(args.spec, m, args.data.seed, 1);
    const auto curve = topn_sweep(data, make_ranker(spec), std::string(method_name(m)), cutoffs, folds, options);
    write_eval_csv(curve, args.out_dir / fmt::format("eval_{}.csv", method_name(m)));
    per_method[std::string(method_name(m))] = method_params(m, spec);
  }
  write_json({{"command", "evaluate"},
              {"methods", per_method},
              {"dataset", dataset_json(args.data)},
              {"folds", args.folds},
              {"cutoffs", cutoffs},
              {"classifier", {{"model", "logistic_regression"}, {"c", args.logreg_c}, {"max_iters", args.logreg_max_iters}}},
              {"f1_average", "macro"},
              {"relative_f1", "mean fold top-n F1 / mean fold all-features F1"},
              {"seed", args.data.seed},
              {"version", kVersion}},
             args.out_dir / "evaluate.json");
}

void run_synth(const SynthArgs& args) {
  const auto data = make_classification(args.samples, args.features, args.informative, args.seed);
  ensure_parent(args.out);
  write_csv(data, args.out);
  auto mask_path = args.out;
  mask_path.replace_extension(".mask.csv");
  write_mask_csv(*data.relevance_mask, mask_path);
  write_json({{"command", "synth"},
              {"params", {{"samples", args.samples}, {"features", args.features}, {"informative", args.informative}}},
              {"mask", mask_path.filename().generic_string()},
              {"target", data.target_name},
              {"seed", args.seed},
              {"version", kVersion}},
             sidecar_path(args.out));
}

void run_attn_diff(const AttnDiffArgs& args) {
  const auto r = attention_difference_experiment(args.options, args.san, args.seed);
  json report = {{"command", "attn-diff"},
                 {"params",
                  {{"samples", args.options.n_samples},
                   {"features", args.options.n_features},
                   {"informative", args.options.n_informative},
                   {"repetitions", args.options.repetitions},
                   {"folds", args.options.folds},
                   {"standardize", args.options.standardize},
                   {"san", san_json(args.san)}}},
                 {"seed", args.seed},
                 {"version", kVersion},
                 {"folds_used", r.folds_used},
                 {"folds_total", r.folds_total},
                 {"instances_positive", r.instances_positive},
                 {"instances_negative", r.instances_negative},
                 {"relevant_mass_positive", r.relevant_mass_positive},
                 {"relevant_mass_negative", r.relevant_mass_negative},
                 {"mean_attention_positive", r.mean_attention_positive},
                 {"mean_attention_negative", r.mean_attention_negative},
                 {"feature_names", r.feature_names},
                 {"relevance_mask", r.relevance_mask}};
  ensure_parent(args.out);
  write_json(report, args.out);

  // Two series per feature for plotting; empty cells when a class had no usable instances.
  auto csv_path = args.out;
  csv_path.replace_extension(".csv");
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "feature,relevant,positive,negative,difference\n");
  const bool pos = !r.mean_attention_positive.empty();
  const bool neg = !r.mean_attention_negative.empty();
  for (std::size_t j = 0; j < r.feature_names.size(); ++j) {
    fmt::format_to(it, "{},{},", r.feature_names[j], r.relevance_mask.empty() ? 0 : int(r.relevance_mask[j]));
    if (pos) fmt::format_to(it, "{}", r.mean_attention_positive[j]);
    fmt::format_to(it, ",");
    if (neg) fmt::format_to(it, "{}", r.mean_attention_negative[j]);
    fmt::format_to(it, ",");
    if (pos && neg) fmt::format_to(it, "{}", r.mean_attention_positive[j] - r.mean_attention_negative[j]);
    fmt::format_to(it, "\n");
  }
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", csv_path.string()));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace attnrank::cli
