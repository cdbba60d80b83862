#include <iostream>

#include "CLI11.hpp"
#include "attnrank/error.hpp"
#include "attnrank/version.hpp"
#include "commands.hpp"

namespace {

using namespace attnrank;
using namespace attnrank::cli;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

const CLI::Validator kMethodName(
    [](std::string& name) { return parse_method(name) ? std::string() : "unknown method '" + name + "'"; }, "METHOD");

void add_dataset_flags(CLI::App* cmd, DatasetArgs& a) {
  cmd->add_option("--input,-i", a.input, "Dataset CSV (header row first)")->required()->check(CLI::ExistingFile);
  auto* name = cmd->add_option("--target,-t", a.target, "Target column name")->capture_default_str();
  auto* index = cmd->add_option("--target-index", a.target_index, "Target column, 0-based index");
  name->excludes(index);
  cmd->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  cmd->add_flag("!--no-standardize", a.standardize, "Skip per-feature standardisation");
  cmd->add_option("--threads", a.threads, "Worker threads, 0 for all cores")->capture_default_str();
}

void add_san_flags(CLI::App* cmd, SanConfig& c) {
  cmd->add_option("--hidden", c.hidden_dim, "SAN hidden width")->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "SAN training epochs")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "SAN mini-batch size")->capture_default_str();
  cmd->add_option("--learning-rate", c.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--dropout", c.dropout_rate, "Dropout rate on the hidden layer")->capture_default_str();
  cmd->add_option("--heads", c.n_heads, "Attention heads")->capture_default_str();
}

void add_method_flags(CLI::App* cmd, RankerSpec& s) {
  add_san_flags(cmd, s.san);
  cmd->add_option("--neighbors", s.relieff.n_neighbors, "ReliefF neighbours per class")->capture_default_str();
  cmd->add_option("--sample-size", s.relieff.sample_size, "ReliefF reference points (default all)");
  cmd->add_option("--bins", s.mi_bins, "Mutual information bins")->capture_default_str();
  cmd->add_option("--trees", s.forest.n_trees, "Random forest trees")->capture_default_str();
  cmd->add_option("--max-features", s.forest.max_features_per_split, "Features tried per split (default sqrt)");
  cmd->add_option("--min-leaf", s.forest.min_leaf_size, "Minimum leaf size")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature ranking with self-attention networks and baseline rankers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank the features of a dataset");
  add_dataset_flags(rank_cmd, rank.data);
  rank_cmd->add_option("--method,-m", rank.method, "Ranking method (attentionClean is an alias of attentionPositive)")
      ->required()
      ->check(kMethodName);
  add_method_flags(rank_cmd, rank.spec);
  rank_cmd->add_option("--out,-o", rank.out, "Output `feature,score,rank` CSV")->required();

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "FUJI curves and similarity matrix between rankings");
  auto* files = compare_cmd->add_option("rankings", compare.rankings, "Ranking CSV files")->check(CLI::ExistingFile);
  auto* manifest = compare_cmd->add_option("--manifest", compare.manifest, "JSON manifest of per-dataset rankings")
                       ->check(CLI::ExistingFile);
  files->excludes(manifest);
  compare_cmd->add_option("--cutoffs", compare.cutoffs, "Cutoff grid (default dense to 100, then log-spaced)")
      ->delimiter(',');
  compare_cmd->add_option("--out,-o", compare.out_dir, "Output directory")->required();

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Top-n logistic regression curves per method");
  add_dataset_flags(eval_cmd, evaluate.data);
  eval_cmd->add_option("--methods,-m", evaluate.methods, "Comma-separated ranking methods")
      ->required()
      ->delimiter(',')
      ->check(kMethodName);
  add_method_flags(eval_cmd, evaluate.spec);
  eval_cmd->add_option("--cutoffs", evaluate.cutoffs, "Cutoff grid (default dense to 100, then log-spaced)")
      ->delimiter(',');
  eval_cmd->add_option("--folds", evaluate.folds, "Stratified folds")->capture_default_str();
  eval_cmd->add_option("--logreg-c", evaluate.logreg_c, "Inverse L2 strength")->capture_default_str();
  eval_cmd->add_option("--logreg-iters", evaluate.logreg_max_iters, "Solver iteration cap")->capture_default_str();
  eval_cmd->add_option("--out,-o", evaluate.out_dir, "Output directory")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic binary dataset and its relevance mask");
  synth_cmd->add_option("--samples", synth.samples, "Instances")->capture_default_str();
  synth_cmd->add_option("--features", synth.features, "Features")->capture_default_str();
  synth_cmd->add_option("--informative", synth.informative, "Informative features")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--out,-o", synth.out, "Output dataset CSV; the mask goes next to it")->required();

  AttnDiffArgs diff;
  auto* diff_cmd = app.add_subcommand("attn-diff", "Mean attention of correct positive vs negative predictions");
  diff_cmd->add_option("--samples", diff.options.n_samples, "Instances")->capture_default_str();
  diff_cmd->add_option("--features", diff.options.n_features, "Features")->capture_default_str();
  diff_cmd->add_option("--informative", diff.options.n_informative, "Informative features")->capture_default_str();
  diff_cmd->add_option("--repetitions", diff.options.repetitions, "CV repetitions")->capture_default_str();
  diff_cmd->add_option("--folds", diff.options.folds, "Folds per repetition")->capture_default_str();
  diff_cmd->add_option("--seed", diff.seed, "Master seed")->capture_default_str();
  diff_cmd->add_flag("!--no-standardize", diff.options.standardize, "Skip per-fold standardisation");
  diff_cmd->add_option("--threads", diff.options.threads, "Worker threads, 0 for all cores")->capture_default_str();
  add_san_flags(diff_cmd, diff.san);
  diff_cmd->add_option("--out,-o", diff.out, "Output report JSON; a plotting CSV goes next to it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto chosen = app.get_subcommands();
    std::cerr << (chosen.empty() ? app.help() : chosen.front()->help());
    return kUsageError;
  }

  if (compare_cmd->parsed() && compare.rankings.empty() && compare.manifest.empty()) {
    std::cerr << "error: give ranking files or --manifest\n\n" << compare_cmd->help();
    return kUsageError;
  }

  try {
    if (rank_cmd->parsed()) run_rank(rank);
    if (compare_cmd->parsed()) run_compare(compare);
    if (eval_cmd->parsed()) run_evaluate(evaluate);
    if (synth_cmd->parsed()) run_synth(synth);
    if (diff_cmd->parsed()) run_attn_diff(diff);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return 0;
}
