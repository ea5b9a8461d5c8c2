#include "convbound/network.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/linalg.hpp"
#include "convbound/norm_bounds.hpp"

namespace convbound {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::fully_connected: return "fully_connected";
        case LayerKind::standard_conv: return "standard_conv";
        case LayerKind::depthwise_conv: return "depthwise_conv";
        case LayerKind::pointwise_conv: return "pointwise_conv";
    }
    return "?";
}

const char* activation_name(Activation act) {
    return act == Activation::relu ? "relu" : "identity";
}

namespace {

std::size_t conv_windows(std::size_t extent, std::size_t k, std::size_t stride) {
    return (extent - k) / stride + 1;
}

// Bounded mode never materializes a lowering and must not hit the oracle's
// size cap either; beyond the cap the iterative engine takes over.
double spectral_norm_small(const DenseMatrix& m) {
    if (std::min(m.rows(), m.cols()) <= oracle_cap()) {
        return spectral_norm_dense_oracle(m);
    }
    return spectral_norm_power(m).value;
}

void validate_layer(const NetworkSpec& spec, std::size_t idx, std::vector<Violation>& out) {
    const LayerSpec& layer = spec.layers[idx];
    const std::size_t num = idx + 1;
    const std::size_t expected_in = idx == 0 ? spec.input_dim : spec.layers[idx - 1].d_out;

    auto fail = [&](std::string msg) { out.push_back({num, std::move(msg)}); };

    if (layer.d_in == 0 || layer.d_out == 0) {
        fail("layer dimensions must be positive");
        return;
    }
    if (layer.d_in != expected_in) {
        fail("d_in " + std::to_string(layer.d_in) + " breaks the chain, expected " +
             std::to_string(expected_in));
    }
    if (!(layer.lipschitz > 0.0)) {
        fail("lipschitz constant must be positive");
    }
    if (layer.activation == Activation::relu && layer.lipschitz != 1.0) {
        fail("relu layers must declare lipschitz = 1");
    }
    if (layer.is_2d() && layer.kind != LayerKind::standard_conv) {
        fail("2-D window fields apply to standard convolutions only");
    }

    switch (layer.kind) {
        case LayerKind::fully_connected:
            break;
        case LayerKind::standard_conv: {
            if (layer.spatial_k == 0 || layer.stride == 0) {
                fail("conv layer needs positive filter extent and stride");
                break;
            }
            if (layer.is_2d()) {
                if (layer.spatial_w == 0 || layer.kernel_h == 0 || layer.kernel_w == 0) {
                    fail("2-D conv needs all of spatial_h, spatial_w, kernel_h, kernel_w");
                    break;
                }
                if (layer.d_in != layer.spatial_h * layer.spatial_w) {
                    fail("d_in must equal spatial_h * spatial_w");
                    break;
                }
                if (layer.spatial_k != layer.kernel_h * layer.kernel_w) {
                    fail("filter extent must equal kernel_h * kernel_w");
                    break;
                }
                if (layer.kernel_h > layer.spatial_h || layer.kernel_w > layer.spatial_w) {
                    fail("filter exceeds the input grid");
                    break;
                }
                const std::size_t m =
                    conv_windows(layer.spatial_h, layer.kernel_h, layer.stride) *
                    conv_windows(layer.spatial_w, layer.kernel_w, layer.stride);
                if (layer.d_out != m * layer.c_out) {
                    fail("d_out " + std::to_string(layer.d_out) +
                         " should be windows*c_out = " + std::to_string(m * layer.c_out));
                }
                break;
            }
            if (layer.spatial_k > layer.d_in) {
                fail("filter extent exceeds input dimension");
                break;
            }
            const std::size_t m = conv_windows(layer.d_in, layer.spatial_k, layer.stride);
            if (layer.d_out != m * layer.c_out) {
                fail("d_out " + std::to_string(layer.d_out) + " should be windows*c_out = " +
                     std::to_string(m * layer.c_out));
            }
            break;
        }
        case LayerKind::depthwise_conv: {
            if (layer.c_in != layer.c_out) {
                fail("depthwise layers need c_in = c_out");
                break;
            }
            if (layer.c_in == 0 || layer.d_in % layer.c_in != 0) {
                fail("d_in must be a positive multiple of the channel count");
                break;
            }
            const std::size_t m = layer.d_in / layer.c_in;
            if (layer.spatial_k == 0 || layer.spatial_k > m) {
                fail("filter extent must lie in [1, per-channel extent]");
                break;
            }
            if (layer.stride == 0) {
                fail("stride must be at least 1");
                break;
            }
            const std::size_t mp = conv_windows(m, layer.spatial_k, layer.stride);
            if (layer.d_out != mp * layer.c_out) {
                fail("d_out " + std::to_string(layer.d_out) + " should be windows*c = " +
                     std::to_string(mp * layer.c_out));
            }
            break;
        }
        case LayerKind::pointwise_conv: {
            if (layer.spatial_k != 1) {
                fail("pointwise layers have spatial extent 1");
            }
            if (layer.c_in == 0 || layer.d_in % layer.c_in != 0) {
                fail("d_in must be a positive multiple of c_in");
                break;
            }
            const std::size_t m = layer.d_in / layer.c_in;
            if (layer.d_out != m * layer.c_out) {
                fail("d_out " + std::to_string(layer.d_out) + " should be m*c_out = " +
                     std::to_string(m * layer.c_out));
            }
            break;
        }
    }
}

}  // namespace

std::vector<Violation> validate(const NetworkSpec& spec) {
    std::vector<Violation> out;
    if (spec.layers.empty()) {
        out.push_back({0, "network depth must be at least 1"});
        return out;
    }
    if (spec.input_dim == 0) {
        out.push_back({0, "input dimension must be positive"});
    }
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        validate_layer(spec, i, out);
    }
    return out;
}

void require_valid(const NetworkSpec& spec) {
    const auto violations = validate(spec);
    if (!violations.empty()) {
        throw DomainError("invalid network: layer " + std::to_string(violations[0].layer) +
                          ": " + violations[0].message);
    }
}

LoweringPlan layer_plan(const LayerSpec& layer) {
    switch (layer.kind) {
        case LayerKind::standard_conv:
            if (layer.is_2d()) {
                return plan_2d(layer.spatial_h, layer.spatial_w, layer.kernel_h,
                               layer.kernel_w, layer.stride);
            }
            return plan_1d(layer.d_in, layer.spatial_k, layer.stride);
        case LayerKind::depthwise_conv:
            return plan_1d(layer.d_in / layer.c_in, layer.spatial_k, layer.stride);
        case LayerKind::pointwise_conv:
            return pointwise_plan(layer.d_in / layer.c_in, layer.c_in);
        case LayerKind::fully_connected:
            break;
    }
    throw DomainError("fully connected layers have no lowering plan");
}

std::size_t layer_outputs_per_filter(const LayerSpec& layer) {
    switch (layer.kind) {
        case LayerKind::fully_connected:
            return layer.d_out;
        case LayerKind::standard_conv:
            if (layer.is_2d()) {
                return conv_windows(layer.spatial_h, layer.kernel_h, layer.stride) *
                       conv_windows(layer.spatial_w, layer.kernel_w, layer.stride);
            }
            return conv_windows(layer.d_in, layer.spatial_k, layer.stride);
        case LayerKind::depthwise_conv:
            return conv_windows(layer.d_in / layer.c_in, layer.spatial_k, layer.stride);
        case LayerKind::pointwise_conv:
            return layer.d_in / layer.c_in;
    }
    return 0;
}

void check_weight_shape(const LayerSpec& layer, const LayerWeight& weight, std::size_t index) {
    const auto bad = [&](const std::string& msg) {
        throw ShapeMismatch("layer " + std::to_string(index) + ": " + msg);
    };
    if (layer.kind == LayerKind::fully_connected) {
        if (!std::holds_alternative<DenseMatrix>(weight)) {
            bad("expected a dense matrix weight");
        }
        const auto& a = std::get<DenseMatrix>(weight);
        if (a.rows() != layer.d_out || a.cols() != layer.d_in) {
            bad("weight is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                ", expected " + std::to_string(layer.d_out) + "x" + std::to_string(layer.d_in));
        }
        return;
    }
    if (!std::holds_alternative<ConvWeight>(weight)) {
        bad("expected a convolutional weight");
    }
    const auto& w = std::get<ConvWeight>(weight);
    std::size_t want_rows = 0;
    std::size_t want_cols = 0;
    switch (layer.kind) {
        case LayerKind::standard_conv:
            want_rows = layer.c_out;
            want_cols = layer.spatial_k;
            if (w.kind != ConvKind::standard) bad("expected a standard conv weight");
            break;
        case LayerKind::depthwise_conv:
            want_rows = layer.c_in;
            want_cols = layer.spatial_k;
            if (w.kind != ConvKind::depthwise) bad("expected a depthwise conv weight");
            break;
        case LayerKind::pointwise_conv:
            want_rows = layer.c_out;
            want_cols = layer.c_in;
            if (w.kind != ConvKind::pointwise) bad("expected a pointwise conv weight");
            break;
        default:
            break;
    }
    if (w.filters.rows() != want_rows || w.filters.cols() != want_cols) {
        bad("filters are " + std::to_string(w.filters.rows()) + "x" +
            std::to_string(w.filters.cols()) + ", expected " + std::to_string(want_rows) + "x" +
            std::to_string(want_cols));
    }
}

DenseMatrix effective_matrix(const LayerSpec& layer, const LayerWeight& weight) {
    check_weight_shape(layer, weight, 0);
    if (layer.kind == LayerKind::fully_connected) {
        return std::get<DenseMatrix>(weight);
    }
    const auto& w = std::get<ConvWeight>(weight);
    switch (layer.kind) {
        case LayerKind::standard_conv:
            return gamma_standard(w, layer_plan(layer));
        case LayerKind::depthwise_conv:
            return gamma_depthwise(w, layer_plan(layer));
        case LayerKind::pointwise_conv:
            return gamma_pointwise(w, layer.d_in / layer.c_in);
        default:
            break;
    }
    throw DomainError("unreachable layer kind");
}

DenseMatrix forward(const NetworkSpec& spec, const std::vector<LayerWeight>& weights,
                    const DenseMatrix& x) {
    require_valid(spec);
    if (weights.size() != spec.layers.size()) {
        throw DimensionMismatch("expected one weight per layer");
    }
    if (x.rows() != spec.input_dim) {
        throw DimensionMismatch("input has " + std::to_string(x.rows()) + " rows, expected " +
                                std::to_string(spec.input_dim));
    }
    DenseMatrix z = x;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        check_weight_shape(layer, weights[i], i + 1);
        DenseMatrix next = multiply(effective_matrix(layer, weights[i]), z);
        if (layer.activation == Activation::relu) {
            for (double& v : next.data()) {
                v = std::max(0.0, v);
            }
        }
        z = std::move(next);
    }
    return z;
}

LayerNorms layer_norms(const LayerSpec& layer, const LayerWeight& weight, NormMode mode) {
    check_weight_shape(layer, weight, 0);
    LayerNorms norms;
    norms.mode = mode;

    if (layer.kind == LayerKind::fully_connected) {
        const auto& a = std::get<DenseMatrix>(weight);
        norms.a = frobenius_norm(a);
        // The FC matrix is the effective matrix; only n21 switches between
        // measured and bounded.
        if (mode == NormMode::exact) {
            norms.s = spectral_norm_dense_oracle(a);
            norms.n21 = norm_2_1(a);
        } else {
            norms.s = spectral_norm_small(a);
            norms.n21 = bound_21_fc(norms.a, layer.d_out);
        }
        return norms;
    }

    const auto& w = std::get<ConvWeight>(weight);
    norms.a = frobenius_norm(w.filters);

    if (mode == NormMode::exact) {
        const DenseMatrix eff = effective_matrix(layer, weight);
        norms.s = spectral_norm_dense_oracle(eff);
        norms.n21 = norm_2_1(eff);
        return norms;
    }

    const std::size_t m = layer_outputs_per_filter(layer);
    switch (layer.kind) {
        case LayerKind::standard_conv:
            norms.s = bound_standard(w, m);
            norms.n21 = bound_21_conv(norms.a, m, layer.c_out);
            break;
        case LayerKind::depthwise_conv:
            norms.s = layer.stride >= layer.spatial_k ? bound_depthwise_nonoverlap(w)
                                                      : bound_depthwise_overlap(w);
            norms.n21 = bound_21_conv(norms.a, m, layer.c_in);
            break;
        case LayerKind::pointwise_conv:
            // Same value spectral_pointwise computes, cap-free.
            norms.s = spectral_norm_small(w.filters);
            norms.n21 = bound_21_conv(norms.a, m, layer.c_out);
            break;
        default:
            break;
    }
    return norms;
}

double effective_f_norm(const LayerSpec& layer, const LayerNorms& norms) {
    if (layer.kind == LayerKind::fully_connected) {
        return norms.a;
    }
    return std::sqrt(static_cast<double>(layer_outputs_per_filter(layer))) * norms.a;
}

}  // namespace convbound
