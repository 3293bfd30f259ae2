#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "dpaudit/anytime_solver.hpp"
#include "dpaudit/dataset.hpp"
#include "dpaudit/evaluation.hpp"
#include "dpaudit/forest.hpp"
#include "dpaudit/noise_model.hpp"
#include "dpaudit/reconstruction.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {
namespace {

void LaplaceIntDraw(benchmark::State& state) {
  const double eps_v = static_cast<double>(state.range(0)) / 100.0;
  Rng rng(42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.laplace_int(eps_v));
  }
}
// eps_v = 0.1, 1, 6: spans the sweep range used by the attack studies.
BENCHMARK(LaplaceIntDraw)->Arg(10)->Arg(100)->Arg(600);

void NoiseTableBuild(benchmark::State& state) {
  const double eps_v = static_cast<double>(state.range(0)) / 1000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(NoiseModel::make(eps_v).log_table.size());
  }
}
// Table length is gamma + 1 = ceil(12 / eps_v) + 1.
BENCHMARK(NoiseTableBuild)->Arg(20)->Arg(1000);

void RouteExample(benchmark::State& state) {
  const BinaryDataset data = generate_synthetic(20, 256, 0.5, {4, 4}, 7);
  const Forest forest = train_dp_forest(data, 10, 5, 10.0, 11);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& row = data.rows[i++ % data.rows.size()];
    for (const auto& tree : forest.trees) {
      benchmark::DoNotOptimize(route_example(tree, row));
    }
  }
  state.SetItemsProcessed(state.iterations() * forest.num_trees());
}
BENCHMARK(RouteExample);

void MinCostMatching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(99);
  std::vector<std::vector<int>> cost(n, std::vector<int>(n));
  for (auto& row : cost) {
    for (int& c : row) c = static_cast<int>(rng.uniform_int(64));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_cost_matching(cost).total_cost);
  }
  state.SetComplexityN(n);
}
BENCHMARK(MinCostMatching)->RangeMultiplier(2)->Range(25, 200)->Complexity();

void AnytimeMoveThroughput(benchmark::State& state) {
  const BinaryDataset data = generate_synthetic(15, 100, 0.5, {3, 4}, 21);
  const Forest forest = train_dp_forest(data, 5, 5, 5.0, 22);
  const ForestView view = attacker_view(forest, data.groups);
  ProblemOptions options;
  options.n_train = data.n();
  const ReconstructionProblem problem =
      build_problem(view, ThreatModel::full, options);
  AnytimeOptions run;
  run.max_moves = 20000;
  std::uint64_t seed = 0;
  long long moves = 0;
  for (auto _ : state) {
    run.seed = seed++;
    const AnytimeResult result = solve_anytime(problem, run);
    moves += result.moves;
    benchmark::DoNotOptimize(result.best.objective);
  }
  // items/s is the solver's sustained move rate including restart overhead.
  state.SetItemsProcessed(moves);
}
BENCHMARK(AnytimeMoveThroughput)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpaudit

BENCHMARK_MAIN();
