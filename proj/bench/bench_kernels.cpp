// Parallel kernels vs their serial reference definitions.
//
//   ./build/bench/mfl_bench --benchmark_filter=Sandwich

#include <benchmark/benchmark.h>

#include "mfl/kernels.hpp"
#include "mfl/random.hpp"

namespace {

using namespace mfl;
namespace k = mfl::kernels;

void BM_Symmetrizer(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(k::symmetrizer(M, 2));
}

void BM_SymmetrizerReference(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(k::reference::symmetrizer(M, 2));
}

void BM_Sandwich(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  Rng rng(1);
  const ComplexMatrix x = random_gaussian(Index{1} << M, Index{1} << M, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::symmetric_sandwich(x, M, 2));
}

void BM_SandwichReference(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  Rng rng(1);
  const ComplexMatrix x = random_gaussian(Index{1} << M, Index{1} << M, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::reference::symmetric_sandwich(x, M, 2));
}

void BM_PermutationAverage(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  Rng rng(4);
  const ComplexMatrix x = random_gaussian(Index{1} << M, Index{1} << M, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::permutation_average(x, M, 2));
}

void BM_PermutationAverageReference(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  Rng rng(4);
  const ComplexMatrix x = random_gaussian(Index{1} << M, Index{1} << M, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::reference::permutation_average(x, M, 2));
}

void BM_ApplyOnSlot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const ComplexMatrix x = random_gaussian(Index{1} << n, Index{1} << n, rng);
  const ComplexMatrix op = random_gaussian(2, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::apply_on_slot(x, op, n / 2, n, k::Side::Right));
}

void BM_ApplyOnSlotReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const ComplexMatrix x = random_gaussian(Index{1} << n, Index{1} << n, rng);
  const ComplexMatrix op = random_gaussian(2, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::reference::apply_on_slot(x, op, n / 2, n, k::Side::Right));
}

void BM_NormalOrdered(benchmark::State& state) {
  const OccupationBasis basis(3, static_cast<int>(state.range(0)));
  Rng rng(3);
  const ComplexMatrix kernel = random_symmetric_kernel(3, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::normal_ordered(kernel, 2, basis));
}

void BM_NormalOrderedReference(benchmark::State& state) {
  const OccupationBasis basis(3, static_cast<int>(state.range(0)));
  Rng rng(3);
  const ComplexMatrix kernel = random_symmetric_kernel(3, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(k::reference::normal_ordered(kernel, 2, basis));
}

}  // namespace

BENCHMARK(BM_Symmetrizer)->DenseRange(4, 8, 2);
BENCHMARK(BM_SymmetrizerReference)->DenseRange(4, 8, 2);
BENCHMARK(BM_Sandwich)->DenseRange(4, 10, 2);
BENCHMARK(BM_SandwichReference)->DenseRange(4, 8, 2);
BENCHMARK(BM_PermutationAverage)->DenseRange(2, 5, 1);
BENCHMARK(BM_PermutationAverageReference)->DenseRange(2, 5, 1);
BENCHMARK(BM_ApplyOnSlot)->DenseRange(6, 10, 2);
BENCHMARK(BM_ApplyOnSlotReference)->DenseRange(6, 10, 2);
BENCHMARK(BM_NormalOrdered)->Arg(4)->Arg(6);
BENCHMARK(BM_NormalOrderedReference)->Arg(4)->Arg(6);

BENCHMARK_MAIN();
