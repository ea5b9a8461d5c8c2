#include <benchmark/benchmark.h>

#include "convbound/linalg.hpp"
#include "convbound/rng.hpp"

using namespace convbound;

namespace {

DenseMatrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
    SplitMix64 rng(seed);
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) {
        v = rng.next_gaussian();
    }
    return m;
}

void BM_PowerIteration(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix m = random_matrix(7, n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_norm_power(m, 1e-10, 10000, 42));
    }
}
BENCHMARK(BM_PowerIteration)->Arg(16)->Arg(64)->Arg(256);

void BM_DenseOracle(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix m = random_matrix(7, n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_norm_dense_oracle(m));
    }
}
BENCHMARK(BM_DenseOracle)->Arg(16)->Arg(64)->Arg(128);

}  // namespace
