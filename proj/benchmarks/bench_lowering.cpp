#include <benchmark/benchmark.h>

#include "convbound/lowering.hpp"
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

void BM_GammaStandard(benchmark::State& state) {
    const std::size_t len = static_cast<std::size_t>(state.range(0));
    const std::size_t k = 9;
    const std::size_t c = 16;
    const LoweringPlan plan = plan_1d(len, k, 1);
    const ConvWeight w = make_standard_weight(random_matrix(1, c, k), k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gamma_standard(w, plan));
    }
}
BENCHMARK(BM_GammaStandard)->Arg(64)->Arg(256)->Arg(1024);

void BM_MuDirectVsLowered(benchmark::State& state) {
    const std::size_t len = static_cast<std::size_t>(state.range(0));
    const std::size_t k = 9;
    const std::size_t c = 16;
    const LoweringPlan plan = plan_1d(len, k, 1);
    const ConvWeight w = make_standard_weight(random_matrix(2, c, k), k);
    const DenseMatrix z = random_matrix(3, len, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mu_direct(w, plan, z));
    }
}
BENCHMARK(BM_MuDirectVsLowered)->Arg(64)->Arg(256)->Arg(1024);

void BM_GammaTimesInput(benchmark::State& state) {
    const std::size_t len = static_cast<std::size_t>(state.range(0));
    const std::size_t k = 9;
    const std::size_t c = 16;
    const LoweringPlan plan = plan_1d(len, k, 1);
    const ConvWeight w = make_standard_weight(random_matrix(2, c, k), k);
    const DenseMatrix g = gamma_standard(w, plan);
    const DenseMatrix z = random_matrix(3, len, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(multiply(g, z));
    }
}
BENCHMARK(BM_GammaTimesInput)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace
