#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "attnrank/eval.hpp"

namespace attnrank::cli {

// Flags shared by the commands that read a dataset.
struct DatasetArgs {
  std::filesystem::path input;
  std::string target = "class";
  std::optional<std::size_t> target_index;
  std::uint64_t seed = 0;
  bool standardize = true;
  std::size_t threads = 1;
};

struct RankArgs {
  DatasetArgs data;
  std::string method;
  RankerSpec spec;
  std::filesystem::path out;
};

struct CompareArgs {
  std::vector<std::filesystem::path> rankings;
  std::filesystem::path manifest;
  std::vector<int> cutoffs;
  std::filesystem::path out_dir;
};

struct EvaluateArgs {
  DatasetArgs data;
  std::vector<std::string> methods;
  RankerSpec spec;
  std::vector<int> cutoffs;
  int folds = 10;
  double logreg_c = 1.0;
  std::size_t logreg_max_iters = 500;
  std::filesystem::path out_dir;
};

struct SynthArgs {
  std::size_t samples = 1000;
  std::size_t features = 100;
  std::size_t informative = 50;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

struct AttnDiffArgs {
  AttnDiffOptions options;
  SanConfig san;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

void run_rank(const RankArgs& args);
void run_compare(const CompareArgs& args);
void run_evaluate(const EvaluateArgs& args);
void run_synth(const SynthArgs& args);
void run_attn_diff(const AttnDiffArgs& args);

// Sidecar path for an output file: `<file>.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& file);

}  // namespace attnrank::cli
