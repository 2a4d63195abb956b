#include <benchmark/benchmark.h>

#include "graphon/estimators.hpp"
#include "graphon/graphon.hpp"
#include "graphon/lower_bounds.hpp"
#include "graphon/model.hpp"
#include "graphon/spectral_metrics.hpp"

using namespace graphon;

namespace {

Adjacency sbm_graph(Index n, std::uint64_t seed) {
  const GraphonSpec spec = block_graphon(4, 0.5, 0.1);
  const LatentDesign design = sample_design({DesignKind::FixedGrid, {}}, static_cast<std::size_t>(n), seed);
  return sample_adjacency(theta_from_graphon(spec, design), seed + 1);
}

void BM_FitAlternating(benchmark::State& state) {
  const Index n = state.range(0);
  const Adjacency a = sbm_graph(n, 1);
  FitOptions opts;
  opts.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_alternating(a, 4, opts, 7).objective);
}
BENCHMARK(BM_FitAlternating)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_OperatorNorm(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix m = sbm_graph(n, 2).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(m));
}
BENCHMARK(BM_OperatorNorm)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_VgPacking(benchmark::State& state) {
  const auto d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vg_packing(d, 3).size());
}
BENCHMARK(BM_VgPacking)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
