// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick a
// kernel; OMP_NUM_THREADS controls the parallel side.

#include <benchmark/benchmark.h>

#include <vector>

#include "hdc/kernels.hpp"

using namespace hdc;
using namespace hdc::kernels;

namespace {

PaddedRows random_rows(std::size_t rows, std::size_t width, std::uint64_t seed) {
  PaddedRows out(rows, width);
  serial::fill_gaussian(CounterRng(Seed{seed}, 0), 1.0, out);
  return out;
}

template <auto Project>
void bm_project(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t features = 900, samples = 64;
  const PaddedRows basis = random_rows(dim, features, 1);
  const PaddedRows xs = random_rows(samples, features, 2);
  std::vector<double> offsets(dim, 0.5);
  std::vector<float> out(samples * dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Project(basis, offsets, Activation::kCosine, xs, out));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples * dim * features));
}

template <auto Fill>
void bm_fill_gaussian(benchmark::State& state) {
  PaddedRows rows(static_cast<std::size_t>(state.range(0)), 900);
  const CounterRng rng(Seed{3}, 0);
  for (auto _ : state) {
    Fill(rng, 1.0, rows);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows.rows() * 900));
}

template <auto Similarities>
void bm_similarities(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t classes = 8, queries = 256;
  std::vector<double> protos(classes * dim, 0.25);
  std::vector<float> q(queries * dim, 0.5f);
  std::vector<double> dots(queries * classes), norms(queries);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Similarities(protos, classes, dim, q, dots, norms));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * queries * classes * dim));
}

}  // namespace

BENCHMARK(bm_project<serial::project>)->Name("project/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bm_project<omp::project>)->Name("project/omp")->Arg(1000)->Arg(10000);
BENCHMARK(bm_fill_gaussian<serial::fill_gaussian>)->Name("fill_gaussian/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bm_fill_gaussian<omp::fill_gaussian>)->Name("fill_gaussian/omp")->Arg(1000)->Arg(10000);
BENCHMARK(bm_similarities<serial::similarities>)->Name("similarities/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bm_similarities<omp::similarities>)->Name("similarities/omp")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
