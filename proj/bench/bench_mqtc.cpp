// Serial reference vs OpenMP kernel timings, plus the two coefficient
// routes (path decomposition vs per-quartet tally).
//
//   cmake --build build --target mqtc_bench && ./build/bench/mqtc_bench

#include <benchmark/benchmark.h>

#include <vector>

#include "mqtc/exact.hpp"
#include "mqtc/hill.hpp"
#include "mqtc/quartet.hpp"
#include "mqtc/rng.hpp"

namespace {

double uniform01(mqtc::SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

mqtc::DistanceMatrix bench_matrix(int n) {
  mqtc::SplitMix64 rng(0xBE9C * static_cast<std::uint64_t>(n));
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "t" + std::to_string(100 + i);
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = uniform01(rng);
      values[static_cast<std::size_t>(i) * n + j] = v;
      values[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return mqtc::DistanceMatrix(std::move(labels), std::move(values));
}

mqtc::LabeledTree bench_tree(int n) {
  mqtc::SplitMix64 rng(0x7EE * static_cast<std::uint64_t>(n));
  return mqtc::random_tree(n, bench_matrix(n).labels(), rng);
}

void BM_ExactSerial(benchmark::State& state) {
  const auto d = bench_matrix(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mqtc::solve_exact_serial(d).best_cost);
  }
}
BENCHMARK(BM_ExactSerial)->Arg(6)->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExactParallel(benchmark::State& state) {
  const auto d = bench_matrix(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mqtc::solve_exact(d).best_cost);
  }
}
BENCHMARK(BM_ExactParallel)->Arg(6)->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_HillSerial(benchmark::State& state) {
  const auto d = bench_matrix(14);
  mqtc::SearchConfig cfg;
  cfg.seed = 3;
  cfg.restarts = 8;
  cfg.max_steps_per_restart = 40;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mqtc::solve_hill_climbing_serial(d, cfg).best_cost);
  }
}
BENCHMARK(BM_HillSerial)->Unit(benchmark::kMillisecond);

void BM_HillParallel(benchmark::State& state) {
  const auto d = bench_matrix(14);
  mqtc::SearchConfig cfg;
  cfg.seed = 3;
  cfg.restarts = 8;
  cfg.max_steps_per_restart = 40;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mqtc::solve_hill_climbing(d, cfg).best_cost);
  }
}
BENCHMARK(BM_HillParallel)->Unit(benchmark::kMillisecond);

void BM_CoefficientPathDecomposition(benchmark::State& state) {
  const auto t = bench_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mqtc::coefficient_matrix(t).pair_sum());
  }
}
BENCHMARK(BM_CoefficientPathDecomposition)->Arg(12)->Arg(20);

void BM_CoefficientQuartetTally(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = bench_tree(n);
  for (auto _ : state) {
    std::int64_t sum = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            const auto q = mqtc::consistent_topology(t, {i, j, k, l});
            sum += q.a + q.c;
          }
    benchmark::DoNotOptimize(sum);
  }
}
BENCHMARK(BM_CoefficientQuartetTally)->Arg(12)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
