#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "convbound/linalg.hpp"
#include "convbound/network.hpp"
#include "convbound/norm_bounds.hpp"
#include "test_util.hpp"

using namespace convbound;
using namespace convbound::testutil;

namespace {

// Scalar-loop reference: multiply by the effective matrix and apply the
// activation one entry at a time, independent of the library's matrix path.
DenseMatrix scalar_forward(const NetworkSpec& spec, const std::vector<LayerWeight>& weights,
                           const DenseMatrix& x) {
    std::vector<std::vector<double>> z(x.cols());
    for (std::size_t p = 0; p < x.cols(); ++p) {
        z[p].resize(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            z[p][i] = x(i, p);
        }
    }
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const DenseMatrix eff = effective_matrix(spec.layers[li], weights[li]);
        for (auto& column : z) {
            std::vector<double> next(eff.rows(), 0.0);
            for (std::size_t i = 0; i < eff.rows(); ++i) {
                for (std::size_t j = 0; j < eff.cols(); ++j) {
                    next[i] += eff(i, j) * column[j];
                }
                if (spec.layers[li].activation == Activation::relu && next[i] < 0.0) {
                    next[i] = 0.0;
                }
            }
            column = std::move(next);
        }
    }
    DenseMatrix out(z[0].size(), x.cols());
    for (std::size_t p = 0; p < x.cols(); ++p) {
        for (std::size_t i = 0; i < z[p].size(); ++i) {
            out(i, p) = z[p][i];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("validation reports violations with layer indices") {
    NetworkSpec empty;
    empty.input_dim = 4;
    auto v = validate(empty);
    REQUIRE(v.size() == 1);
    CHECK(v[0].layer == 0);

    NetworkSpec ok;
    ok.input_dim = 4;
    ok.layers = {fc_layer(4, 3), fc_layer(3, 2)};
    CHECK(validate(ok).empty());

    NetworkSpec broken = ok;
    broken.layers[1].d_in = 5;
    v = validate(broken);
    REQUIRE(v.size() == 1);
    CHECK(v[0].layer == 2);

    NetworkSpec relu_rho = ok;
    relu_rho.layers[0].lipschitz = 2.0;
    v = validate(relu_rho);
    REQUIRE(v.size() == 1);
    CHECK(v[0].layer == 1);

    NetworkSpec conv;
    conv.input_dim = 12;
    conv.layers = {depthwise_layer(6, 2, 3, 1)};
    CHECK(validate(conv).empty());
    conv.layers[0].d_out += 1;
    CHECK(validate(conv).size() == 1);
}

TEST_CASE("forward closed cases") {
    NetworkSpec id_net;
    id_net.input_dim = 3;
    id_net.layers = {fc_layer(3, 3, Activation::identity)};
    SplitMix64 rng(1);
    const DenseMatrix x = random_matrix(rng, 3, 4);
    const DenseMatrix out = forward(id_net, {DenseMatrix::identity(3)}, x);
    CHECK(max_abs_diff(out, x) == 0.0);

    NetworkSpec neg_net;
    neg_net.input_dim = 3;
    neg_net.layers = {fc_layer(3, 3, Activation::relu)};
    const DenseMatrix all_pos(3, 2, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    const DenseMatrix zero = forward(neg_net, {scale(DenseMatrix::identity(3), -1.0)}, all_pos);
    CHECK(frobenius_norm(zero) == 0.0);
}

TEST_CASE("forward matches the scalar reference on a mixed network") {
    SplitMix64 rng(2);
    NetworkSpec spec;
    spec.input_dim = 12;
    spec.layers = {
        depthwise_layer(6, 2, 3, 1),
        pointwise_layer(4, 2, 3),
        fc_layer(12, 5),
    };
    REQUIRE(validate(spec).empty());
    std::vector<LayerWeight> weights = {
        make_depthwise_weight(random_matrix(rng, 2, 3)),
        make_pointwise_weight(random_matrix(rng, 3, 2)),
        random_matrix(rng, 5, 12),
    };
    const DenseMatrix x = random_matrix(rng, 12, 3);
    const DenseMatrix got = forward(spec, weights, x);
    const DenseMatrix want = scalar_forward(spec, weights, x);
    CHECK(relative_fro_diff(got, want) <= 1e-13);
}

TEST_CASE("identity activations compose into one product") {
    SplitMix64 rng(3);
    NetworkSpec spec;
    spec.input_dim = 6;
    spec.layers = {fc_layer(6, 4, Activation::identity), fc_layer(4, 3, Activation::identity)};
    std::vector<LayerWeight> weights = {random_matrix(rng, 4, 6), random_matrix(rng, 3, 4)};
    const DenseMatrix x = random_matrix(rng, 6, 5);
    const DenseMatrix composed = multiply(
        std::get<DenseMatrix>(weights[1]),
        multiply(std::get<DenseMatrix>(weights[0]), x));
    CHECK(relative_fro_diff(forward(spec, weights, x), composed) <= 1e-12);
}

TEST_CASE("effective matrices per kind") {
    const LayerSpec fc = fc_layer(3, 2);
    SplitMix64 rng(4);
    const DenseMatrix a = random_matrix(rng, 2, 3);
    CHECK(max_abs_diff(effective_matrix(fc, a), a) == 0.0);

    // Standard conv layer over the worked 3x4 example, flattened.
    LayerSpec conv;
    conv.kind = LayerKind::standard_conv;
    conv.d_in = 12;
    conv.spatial_k = 4;
    conv.stride = 1;
    conv.c_out = 1;
    conv.d_out = 9;
    REQUIRE(((conv.d_in - conv.spatial_k) / conv.stride + 1) * conv.c_out == 9);
    const ConvWeight w = make_standard_weight(random_matrix(rng, 1, 4), 4);
    const DenseMatrix eff = effective_matrix(conv, w);
    CHECK(eff.rows() == 9);
    CHECK(eff.cols() == 12);

    // 2-D standard conv layer over the 3x4 grid: its effective matrix is
    // the classic 6x12 lowering.
    LayerSpec grid;
    grid.kind = LayerKind::standard_conv;
    grid.d_in = 12;
    grid.d_out = 6;
    grid.spatial_k = 4;
    grid.stride = 1;
    grid.c_out = 1;
    grid.spatial_h = 3;
    grid.spatial_w = 4;
    grid.kernel_h = 2;
    grid.kernel_w = 2;
    NetworkSpec grid_net;
    grid_net.input_dim = 12;
    grid_net.layers = {grid};
    REQUIRE(validate(grid_net).empty());
    const ConvWeight grid_w =
        make_standard_weight(DenseMatrix(1, 4, {1.0, 2.0, 3.0, 4.0}), 4);
    const DenseMatrix grid_eff = effective_matrix(grid, grid_w);
    CHECK(max_abs_diff(grid_eff, gamma_standard(grid_w, plan_2d(3, 4, 2, 2, 1))) == 0.0);
    CHECK(grid_eff(0, 0) == 1.0);
    CHECK(grid_eff(0, 5) == 4.0);
    CHECK(grid_eff(5, 11) == 4.0);

    const LayerSpec dw = depthwise_layer(5, 2, 2, 1);
    const ConvWeight dw_w = make_depthwise_weight(random_matrix(rng, 2, 2));
    const DenseMatrix dw_eff = effective_matrix(dw, dw_w);
    CHECK(dw_eff.rows() == 8);
    CHECK(dw_eff.cols() == 10);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 5; j < 10; ++j) {
            CHECK(dw_eff(i, j) == 0.0);
        }
    }
    CHECK_THROWS_AS(effective_matrix(dw, make_depthwise_weight(random_matrix(rng, 3, 2))),
                    ShapeMismatch);
}

TEST_CASE("layer norms: fully connected identity") {
    const LayerSpec fc = fc_layer(3, 3);
    const LayerNorms norms = layer_norms(fc, LayerWeight(DenseMatrix::identity(3)),
                                         NormMode::exact);
    CHECK(norms.a == doctest::Approx(std::sqrt(3.0)));
    CHECK(norms.s == doctest::Approx(1.0));
    CHECK(norms.n21 == doctest::Approx(3.0));
}

TEST_CASE("layer norms: pointwise exact equals bounded") {
    SplitMix64 rng(5);
    const LayerSpec pw = pointwise_layer(5, 3, 4);
    const LayerWeight w = make_pointwise_weight(random_matrix(rng, 4, 3));
    const LayerNorms exact = layer_norms(pw, w, NormMode::exact);
    const LayerNorms bounded = layer_norms(pw, w, NormMode::bounded);
    CHECK(close_rel(exact.s, bounded.s, 1e-10));
    CHECK(exact.a == bounded.a);
}

TEST_CASE("layer norms: exact never exceeds bounded") {
    SplitMix64 rng(6);
    for (int t = 0; t < 30; ++t) {
        std::vector<std::pair<LayerSpec, LayerWeight>> cases;
        {
            const std::size_t k = 1 + rng.next_below(4);
            const std::size_t len = k + 1 + rng.next_below(16);
            const std::size_t stride = 1 + rng.next_below(3);
            const std::size_t c = 1 + rng.next_below(4);
            cases.emplace_back(standard_layer(len, k, stride, c),
                               make_standard_weight(random_matrix(rng, c, k), k));
        }
        {
            const std::size_t k = 2 + rng.next_below(3);
            const std::size_t stride = 1 + rng.next_below(k + 1);
            const std::size_t spatial = k + stride * (1 + rng.next_below(5));
            const std::size_t c = 1 + rng.next_below(4);
            cases.emplace_back(depthwise_layer(spatial, c, k, stride),
                               make_depthwise_weight(random_matrix(rng, c, k)));
        }
        {
            const std::size_t c = 1 + rng.next_below(4);
            const std::size_t cp = 1 + rng.next_below(4);
            const std::size_t m = 1 + rng.next_below(6);
            cases.emplace_back(pointwise_layer(m, c, cp),
                               make_pointwise_weight(random_matrix(rng, cp, c)));
        }
        for (const auto& [layer, weight] : cases) {
            const LayerNorms exact = layer_norms(layer, weight, NormMode::exact);
            const LayerNorms bounded = layer_norms(layer, weight, NormMode::bounded);
            CHECK(exact.s <= bounded.s + 1e-10);
            CHECK(exact.n21 <= bounded.n21 + 1e-10);
            CHECK(exact.a == bounded.a);
        }
    }
}

TEST_CASE("forward norm is controlled by the spectral chain") {
    SplitMix64 rng(7);
    for (int t = 0; t < 10; ++t) {
        NetworkSpec spec;
        spec.input_dim = 10;
        spec.layers = {
            standard_layer(10, 3, 1, 2),
            fc_layer(16, 6),
            fc_layer(6, 4),
        };
        REQUIRE(validate(spec).empty());
        std::vector<LayerWeight> weights = {
            make_standard_weight(random_matrix(rng, 2, 3), 3),
            random_matrix(rng, 6, 16),
            random_matrix(rng, 4, 6),
        };
        const DenseMatrix x = random_matrix(rng, 10, 4);
        double chain = 1.0;
        for (std::size_t i = 0; i < spec.layers.size(); ++i) {
            const LayerNorms norms = layer_norms(spec.layers[i], weights[i], NormMode::exact);
            chain *= spec.layers[i].lipschitz * norms.s;
        }
        CHECK(frobenius_norm(forward(spec, weights, x)) <=
              frobenius_norm(x) * chain + 1e-9);
    }
}

TEST_CASE("conv layers may precede or follow fully connected layers") {
    SplitMix64 rng(8);
    NetworkSpec spec;
    spec.input_dim = 5;
    spec.layers = {fc_layer(5, 12), depthwise_layer(6, 2, 3, 1), fc_layer(8, 3)};
    REQUIRE(validate(spec).empty());
    std::vector<LayerWeight> weights = {
        random_matrix(rng, 12, 5),
        make_depthwise_weight(random_matrix(rng, 2, 3)),
        random_matrix(rng, 3, 8),
    };
    const DenseMatrix out = forward(spec, weights, random_matrix(rng, 5, 2));
    CHECK(out.rows() == 3);
    CHECK(out.cols() == 2);
}
