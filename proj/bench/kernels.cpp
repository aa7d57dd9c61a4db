// OpenMP kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <memory>

#include "vspace/algorithms.hpp"
#include "vspace/explicit.hpp"
#include "vspace/grid_uso.hpp"
#include "vspace/instances.hpp"
#include "vspace/reference.hpp"

namespace {

using namespace vs;

// A violator space with n elements: the tabulated coordinate-order USO on
// blocks of sizes (n - n/2, n/2).
std::shared_ptr<const ExplicitViolatorSpace> space_of_size(std::size_t n) {
  Rng rng(n);
  const auto u = std::make_shared<const GridUso>(
      random_coordinate_order_uso(GridPartition::consecutive({n - n / 2, n / 2}), rng));
  return std::make_shared<const ExplicitViolatorSpace>(tabulate(UsoOracle(u)));
}

std::shared_ptr<const GridUso> coordinate_uso(std::size_t n) {
  Rng rng(n);
  return std::make_shared<const GridUso>(
      random_coordinate_order_uso(GridPartition::consecutive({n - 2 * (n / 3), n / 3, n / 3}), rng));
}

void BM_CheckAxioms(benchmark::State& state) {
  const auto s = space_of_size(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_axioms(*s));
}

void BM_CheckAxiomsSerial(benchmark::State& state) {
  const auto s = space_of_size(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::check_axioms(*s));
}

void BM_CheckAbstractAxioms(benchmark::State& state) {
  const auto t = concrete_to_abstract(to_concrete(*space_of_size(static_cast<std::size_t>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(check_abstract_axioms(t));
}

void BM_CheckAbstractAxiomsSerial(benchmark::State& state) {
  const auto t = concrete_to_abstract(to_concrete(*space_of_size(static_cast<std::size_t>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(reference::check_abstract_axioms(t));
}

void BM_TabulateUso(benchmark::State& state) {
  const UsoOracle o(coordinate_uso(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(tabulate(o));
}

void BM_TabulateUsoSerial(benchmark::State& state) {
  const UsoOracle o(coordinate_uso(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(reference::tabulate(o));
}

void BM_ValidateUso(benchmark::State& state) {
  const auto u = coordinate_uso(static_cast<std::size_t>(state.range(0)))->materialize();
  for (auto _ : state) benchmark::DoNotOptimize(validate_uso(u));
}

void BM_ValidateUsoSerial(benchmark::State& state) {
  const auto u = coordinate_uso(static_cast<std::size_t>(state.range(0)))->materialize();
  for (auto _ : state) benchmark::DoNotOptimize(reference::validate_uso(u));
}

void BM_SamplingCounts(benchmark::State& state) {
  const UsoOracle o(coordinate_uso(300));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampling_counts(o, ConstraintSet(300), 40, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_SamplingCountsSerial(benchmark::State& state) {
  const UsoOracle o(coordinate_uso(300));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::sampling_counts(o, ConstraintSet(300), 40, static_cast<std::size_t>(state.range(0)), 1));
  }
}

}  // namespace

BENCHMARK(BM_CheckAxioms)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckAxiomsSerial)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckAbstractAxioms)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckAbstractAxiomsSerial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TabulateUso)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TabulateUsoSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValidateUso)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValidateUsoSerial)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplingCounts)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplingCountsSerial)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
