#include <benchmark/benchmark.h>

#include "attnrank/baselines.hpp"
#include "attnrank/eval.hpp"
#include "attnrank/ranking_compare.hpp"
#include "attnrank/san.hpp"

namespace {

using namespace attnrank;

SanModel model_for(std::size_t f, std::size_t heads) {
  SanConfig cfg;
  cfg.n_heads = heads;
  return init_model(f, 2, cfg);
}

void BM_SanTrainEpoch(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto data = make_classification(500, f, f / 2, 1);
  SanConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, cfg));
}
BENCHMARK(BM_SanTrainEpoch)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LossAndGradients(benchmark::State& state) {
  const auto model = model_for(static_cast<std::size_t>(state.range(0)), 1);
  const auto data = make_classification(5, model.n_features(), 1, 2);
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(model, data.features, data.labels, rng));
}
BENCHMARK(BM_LossAndGradients)->Arg(20)->Arg(100)->Arg(500);

void BM_ImportanceInstance(benchmark::State& state) {
  const auto model = model_for(100, 1);
  const auto data = make_classification(static_cast<std::size_t>(state.range(0)), 100, 10, 3);
  for (auto _ : state) benchmark::DoNotOptimize(importance_instance(model, data));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ImportanceInstance)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_ImportanceGlobal(benchmark::State& state) {
  const auto model = model_for(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(importance_global(model));
}
BENCHMARK(BM_ImportanceGlobal)->Arg(100)->Arg(1000);

void BM_ReliefF(benchmark::State& state) {
  const auto data = make_classification(static_cast<std::size_t>(state.range(0)), 50, 10, 4);
  for (auto _ : state) benchmark::DoNotOptimize(relieff(data));
}
BENCHMARK(BM_ReliefF)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_MutualInformation(benchmark::State& state) {
  const auto data = make_classification(static_cast<std::size_t>(state.range(0)), 50, 10, 5);
  for (auto _ : state) benchmark::DoNotOptimize(mutual_information(data));
}
BENCHMARK(BM_MutualInformation)->Arg(1000)->Arg(10000);

void BM_RandomForest(benchmark::State& state) {
  const auto data = make_classification(500, 50, 10, 6);
  ForestParams params;
  params.n_trees = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(random_forest_importance(data, params));
}
BENCHMARK(BM_RandomForest)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FujiCurve(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  ImportanceVector a, b;
  Rng rng(7);
  for (std::size_t j = 0; j < f; ++j) {
    a.scores.push_back(rng.uniform());
    b.scores.push_back(rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(fuji_curve(a, b));
}
BENCHMARK(BM_FujiCurve)->Arg(100)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_LogReg(benchmark::State& state) {
  const auto data = make_classification(600, static_cast<std::size_t>(state.range(0)), 5, 8);
  for (auto _ : state) benchmark::DoNotOptimize(train_logreg(data.features, data.labels));
}
BENCHMARK(BM_LogReg)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
