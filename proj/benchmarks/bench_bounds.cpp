#include <benchmark/benchmark.h>

#include "convbound/bound_zoo.hpp"
#include "convbound/bundle.hpp"

using namespace convbound;

namespace {

// Smaller variant of the test stack so the exact-mode benchmark stays cheap.
NetworkSpec separable_stack() {
    NetworkSpec spec;
    std::size_t spatial = 96;
    std::size_t channels = 2;
    spec.input_dim = spatial * channels;
    for (std::size_t p = 0; p < 13; ++p) {
        const std::size_t stride = (p == 1 || p == 3) ? 2 : 1;
        LayerSpec dw;
        dw.kind = LayerKind::depthwise_conv;
        dw.d_in = spatial * channels;
        dw.spatial_k = 3;
        dw.stride = stride;
        dw.c_in = channels;
        dw.c_out = channels;
        spatial = (spatial - 3) / stride + 1;
        dw.d_out = spatial * channels;
        spec.layers.push_back(dw);

        const std::size_t next = p == 0 ? 4 : channels;
        LayerSpec pw;
        pw.kind = LayerKind::pointwise_conv;
        pw.d_in = spatial * channels;
        pw.spatial_k = 1;
        pw.c_in = channels;
        pw.c_out = next;
        pw.d_out = spatial * next;
        spec.layers.push_back(pw);
        channels = next;
    }
    LayerSpec head;
    head.kind = LayerKind::fully_connected;
    head.d_in = spatial * channels;
    head.d_out = 10;
    spec.layers.push_back(head);
    return spec;
}

void BM_ArchitectureComparisonBounded(benchmark::State& state) {
    const NetworkSpec spec = separable_stack();
    const NetBundle bundle = gen_weights(spec, 1, ScaleMode::unit_frobenius);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            architecture_comparison(spec, bundle.weights, NormMode::bounded));
    }
}
BENCHMARK(BM_ArchitectureComparisonBounded);

void BM_ArchitectureComparisonExact(benchmark::State& state) {
    const NetworkSpec spec = separable_stack();
    const NetBundle bundle = gen_weights(spec, 1, ScaleMode::unit_frobenius);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            architecture_comparison(spec, bundle.weights, NormMode::exact));
    }
}
BENCHMARK(BM_ArchitectureComparisonExact);

}  // namespace
