// Serial k-d tree reference against the pairwise kernels, plus one greedy
// ranking pass.

#include <benchmark/benchmark.h>

#include <random>

#include "entropy_embed/estimators.hpp"
#include "entropy_embed/nue.hpp"
#include "entropy_embed/prediction.hpp"
#include "entropy_embed/simgen.hpp"
#include "entropy_embed/workers.hpp"

using namespace entropy_embed;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
  return m;
}

const KsgParams kParams{10, 0};

void BM_cmi_reference(benchmark::State& state) {
  const Matrix g = gaussian(state.range(0), 4, 1);
  const Matrix a = g.leftCols(1), b = g.col(1), s = g.rightCols(2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::ksg_cmi(a, b, s, kParams));
}

void BM_cmi_kernel(benchmark::State& state) {
  const Matrix g = gaussian(state.range(0), 4, 1);
  const Matrix a = g.leftCols(1), b = g.col(1), s = g.rightCols(2);
  for (auto _ : state) benchmark::DoNotOptimize(ksg_cmi(a, b, s, kParams));
}

void BM_nn_reference(benchmark::State& state) {
  const Matrix g = gaussian(state.range(0), 4, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::nn_predict(g.col(0), g.rightCols(3), 10, 0));
}

void BM_nn_kernel(benchmark::State& state) {
  const Matrix g = gaussian(state.range(0), 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nn_predict(g.col(0), g.rightCols(3), 10, 0));
}

// One CMI ranking pass over a 25-candidate Henon pool with two columns in S.
void BM_select_cmi(benchmark::State& state) {
  const Simulation sim = henon(static_cast<int>(state.range(0)), 0.6, 3);
  NueConfig config;
  const MultivariateSeries prepared = prepare_series(sim.series, config);
  TargetSearch search = make_target_search(prepared, 2, config);
  search.include(search.select_cmi().pool_index);
  search.include(search.select_cmi().pool_index);
  for (auto _ : state) benchmark::DoNotOptimize(search.select_cmi());
}

void BM_select_msr(benchmark::State& state) {
  const Simulation sim = henon(static_cast<int>(state.range(0)), 0.6, 3);
  NueConfig config;
  const MultivariateSeries prepared = prepare_series(sim.series, config);
  TargetSearch search = make_target_search(prepared, 2, config);
  search.include(search.select_msr(1.0).pool_index);
  search.include(search.select_msr(1.0).pool_index);
  for (auto _ : state) benchmark::DoNotOptimize(search.select_msr(1.0));
}

}  // namespace

BENCHMARK(BM_cmi_reference)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cmi_kernel)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nn_reference)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nn_kernel)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_select_cmi)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_select_msr)->Arg(512)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  set_workers(resolve_workers(std::nullopt));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
