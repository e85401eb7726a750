#include <benchmark/benchmark.h>

#include "boundcount/limits.hpp"
#include "boundcount/limits_total.hpp"
#include "boundcount/report.hpp"

namespace bc = boundcount;

namespace {

bc::Potential exponential(double g) {
  return bc::make_builtin(bc::PotentialKind::exponential, {{"g", g}, {"R", 1.0}});
}

}  // namespace

// Exact N_0 as the coupling grows; cost follows the number of nodes.
static void BM_CountPartialWave(benchmark::State& state) {
  const bc::Potential p = exponential(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bc::count_partial_wave(p, 0).N);
}
BENCHMARK(BM_CountPartialWave)->Arg(2)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_CountMorseStrong(benchmark::State& state) {
  const bc::Potential p =
      bc::make_builtin(bc::PotentialKind::morse, {{"g", 5000.0}, {"R", 1.0}, {"alpha", 1.0}});
  for (auto _ : state) benchmark::DoNotOptimize(bc::count_partial_wave(p, 0).N);
}
BENCHMARK(BM_CountMorseStrong)->Unit(benchmark::kMillisecond);

static void BM_TotalCount(benchmark::State& state) {
  const bc::Potential p = exponential(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bc::total_count(p));
}
BENCHMARK(BM_TotalCount)->Arg(8)->Arg(28)->Unit(benchmark::kMillisecond);

static void BM_MakeChannel(benchmark::State& state) {
  const bc::Potential p = exponential(18.0);
  for (auto _ : state) benchmark::DoNotOptimize(bc::make_channel(p, static_cast<int>(state.range(0))).on_V.S);
}
BENCHMARK(BM_MakeChannel)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_EvaluateAll(benchmark::State& state) {
  const bc::Channel ch = bc::make_channel(exponential(18.0), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bc::evaluate_all(ch).size());
}
BENCHMARK(BM_EvaluateAll)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_TotalBounds(benchmark::State& state) {
  const bc::Potential p = exponential(8.0);
  for (auto _ : state) benchmark::DoNotOptimize(bc::total_bounds(p).size());
}
BENCHMARK(BM_TotalBounds)->Unit(benchmark::kMillisecond);

static void BM_ComputeTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bc::compute_table(static_cast<int>(state.range(0))).mismatches);
}
BENCHMARK(BM_ComputeTable)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_ExpressionEval(benchmark::State& state) {
  const bc::Potential p = bc::parse_potential_spec("expr:'-g^2*exp(-r/R)/(r/R)':g=4,R=1");
  double r = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.eval(r));
    r = r < 10.0 ? r + 0.01 : 0.1;
  }
}
BENCHMARK(BM_ExpressionEval);

BENCHMARK_MAIN();
