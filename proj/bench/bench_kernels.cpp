// Serial reference kernels against their OpenMP versions.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "dfock/parallel.hpp"
#include "dfock/reference.hpp"

namespace {

using cplx = std::complex<double>;

double term(std::size_t i) {
  const double x = static_cast<double>(i) * 1e-4;
  return std::exp(-x) * std::cos(3.0 * x);
}

void BM_sum_serial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(dfock::reference::sequential_sum<double>(n, term));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sum_omp(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(dfock::kernels::blocked_sum<double>(n, term));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_map_serial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(dfock::reference::serial_map<double>(n, term));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_map_omp(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(dfock::kernels::parallel_map<double>(n, term));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct GramInput {
  std::vector<cplx> u;
  std::vector<double> w;
  std::size_t dim;
  GramInput(std::size_t rows, std::size_t d) : u(rows * d), w(rows), dim(d) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (auto& x : u) x = {nd(rng), nd(rng)};
    for (auto& x : w) x = std::abs(nd(rng));
  }
};

void BM_gram_serial(benchmark::State& st) {
  const GramInput in(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(dfock::reference::weighted_gram<cplx>(in.u, in.w, in.dim));
}

void BM_gram_omp(benchmark::State& st) {
  const GramInput in(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(dfock::kernels::weighted_gram<cplx>(in.u, in.w, in.dim));
}

}  // namespace

BENCHMARK(BM_sum_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_sum_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_map_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_map_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_gram_serial)->Args({4096, 41})->Args({16384, 61});
BENCHMARK(BM_gram_omp)->Args({4096, 41})->Args({16384, 61});

BENCHMARK_MAIN();
