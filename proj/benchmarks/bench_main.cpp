#include <benchmark/benchmark.h>

#include "iltlab/capacity.hpp"
#include "iltlab/green.hpp"
#include "iltlab/rate.hpp"
#include "iltlab/rng.hpp"
#include "iltlab/trail.hpp"
#include "iltlab/walk.hpp"

using namespace iltlab;

namespace {

const GreenOracle& oracle16() {
  static const GreenOracle g = GreenOracle::solve_box(5, 16);
  return g;
}

void BM_GreenBoxSolve(benchmark::State& state) {
  const int box = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(GreenOracle::solve_box(5, box).at_origin());
}
BENCHMARK(BM_GreenBoxSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_WalkSteps(benchmark::State& state) {
  WalkState w = start_walk(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(advance(w));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WalkSteps)->Arg(3)->Arg(5);

void BM_TruncatedLocalTimes(benchmark::State& state) {
  std::uint64_t replica = 0;
  for (auto _ : state) {
    const auto f = simulate_local_times(5, 1, TruncatedInfinite{state.range(0)}, {true, replica++});
    benchmark::DoNotOptimize(f.total());
  }
}
BENCHMARK(BM_TruncatedLocalTimes)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_EquilibriumSolve(benchmark::State& state) {
  const SiteList s = l1_ball(5, static_cast<int>(state.range(0)));
  const auto& g = oracle16();
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_solve(s, g).capacity);
  state.counters["sites"] = static_cast<double>(s.size());
}
BENCHMARK(BM_EquilibriumSolve)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_OperatorNorm(benchmark::State& state) {
  const SiteList s = l1_ball(5, static_cast<int>(state.range(0)));
  const auto& g = oracle16();
  const Eigen::MatrixXd k = reduced_green_matrix(s, g);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(k).value);
  state.counters["sites"] = static_cast<double>(s.size());
}
BENCHMARK(BM_OperatorNorm)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_TrailExtraction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SiteList lambda = l1_ball(3, 1);
  StreamRng rng(7, 0);
  std::vector<int> visits;
  for (int i = 0; i < 400; ++i) visits.push_back(i < n ? i : static_cast<int>(rng.below(static_cast<std::uint32_t>(n))));
  const SiteList sites = normalized(SiteList(lambda.begin(), lambda.begin() + n));
  const auto e = occupation_from_visits(sites, visits);
  for (auto _ : state) benchmark::DoNotOptimize(extract_trail_stock(e).holds);
}
BENCHMARK(BM_TrailExtraction)->Arg(4)->Arg(7)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
