#include <benchmark/benchmark.h>

#include "surco/baselines.hpp"
#include "surco/random.hpp"
#include "surco/solvers.hpp"
#include "surco/surco.hpp"

using namespace surco;

namespace {

RouteInstance grid(int n) {
  return generate_route_instances(n, n, 1, DeadlineRegime::normal(), 11)[0];
}

void BM_ShortestPath(benchmark::State& state) {
  const auto inst = grid(static_cast<int>(state.range(0)));
  Rng rng(3);
  std::vector<double> c(static_cast<std::size_t>(inst.num_edges()));
  for (double& v : c) v = rng.uniform(0.1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_shortest_path(inst, c));
}
BENCHMARK(BM_ShortestPath)->Arg(3)->Arg(5)->Arg(10);

void BM_EnumeratePaths(benchmark::State& state) {
  const auto inst = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_paths(inst));
}
BENCHMARK(BM_EnumeratePaths)->Arg(3)->Arg(5);

void BM_ExactOracle5x5(benchmark::State& state) {
  const auto inst = grid(5);
  for (auto _ : state) benchmark::DoNotOptimize(exact_oracle(inst));
}
BENCHMARK(BM_ExactOracle5x5);

void BM_SurcoZero5x5(benchmark::State& state) {
  const auto inst = grid(5);
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  ZeroConfig cfg;
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(surco_zero(oracle, obj, cfg));
}
BENCHMARK(BM_SurcoZero5x5)->Unit(benchmark::kMicrosecond);

void BM_AssignmentSolve(benchmark::State& state) {
  const auto inst =
      generate_assignment_instances(static_cast<int>(state.range(0)), 3, 1, 13)[0];
  Rng rng(4);
  std::vector<double> c(static_cast<std::size_t>(inst.num_variables()));
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(inst, c));
}
BENCHMARK(BM_AssignmentSolve)->Arg(6)->Arg(12);

}  // namespace
BENCHMARK_MAIN();
