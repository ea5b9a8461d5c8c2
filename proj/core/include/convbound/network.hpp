#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "convbound/lowering.hpp"

namespace convbound {

enum class LayerKind { fully_connected, standard_conv, depthwise_conv, pointwise_conv };
enum class Activation { relu, identity };

const char* layer_kind_name(LayerKind kind);
const char* activation_name(Activation act);

struct LayerSpec {
    LayerKind kind = LayerKind::fully_connected;
    std::size_t d_in = 0;
    std::size_t d_out = 0;
    std::size_t spatial_k = 0;  // conv kinds; 1 for pointwise
    std::size_t stride = 1;     // conv kinds
    std::size_t c_in = 1;
    std::size_t c_out = 1;
    // Optional 2-D window shape for standard convolutions; all four set
    // means the input is a row-major flattened spatial_h x spatial_w grid
    // and spatial_k equals kernel_h * kernel_w.
    std::size_t spatial_h = 0;
    std::size_t spatial_w = 0;
    std::size_t kernel_h = 0;
    std::size_t kernel_w = 0;
    double lipschitz = 1.0;
    Activation activation = Activation::relu;

    bool is_2d() const noexcept { return spatial_h > 0; }
};

struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<LayerSpec> layers;

    std::size_t depth() const noexcept { return layers.size(); }
};

// A dimension or consistency violation; layer is 1-based, 0 for
// network-level problems.
struct Violation {
    std::size_t layer;
    std::string message;
};

// Collects every violation instead of stopping at the first one; an empty
// result means the description is valid.
std::vector<Violation> validate(const NetworkSpec& spec);
void require_valid(const NetworkSpec& spec);  // throws DomainError with the first violation

// FC layers carry their matrix directly, conv layers a ConvWeight.
using LayerWeight = std::variant<DenseMatrix, ConvWeight>;

// Sliding-window plan implied by a conv layer's shape fields.
LoweringPlan layer_plan(const LayerSpec& layer);

// Window applications per filter (m); for FC layers this is d_out.
std::size_t layer_outputs_per_filter(const LayerSpec& layer);

// Checks that a weight has the shape the layer declares.
void check_weight_shape(const LayerSpec& layer, const LayerWeight& weight, std::size_t index);

// The d_out x d_in matrix a layer multiplies by: the FC matrix itself, or
// the lowering of the conv weight.
DenseMatrix effective_matrix(const LayerSpec& layer, const LayerWeight& weight);

// Applies each layer's effective matrix followed by its activation.
DenseMatrix forward(const NetworkSpec& spec, const std::vector<LayerWeight>& weights,
                    const DenseMatrix& x);

enum class NormMode { exact, bounded };

// Per-layer norms used by the complexity and bound evaluators. In exact
// mode s and n21 are measured on the materialized effective matrix; in
// bounded mode they come from the closed-form results for each kind and
// only small matrices are ever factorized.
struct LayerNorms {
    double a = 0.0;    // Frobenius norm of the stored weight
    double s = 0.0;    // spectral norm of the effective matrix (or its bound)
    double n21 = 0.0;  // 2,1-norm of the effective matrix (or its bound)
    NormMode mode = NormMode::exact;
};

LayerNorms layer_norms(const LayerSpec& layer, const LayerWeight& weight, NormMode mode);

// Exact Frobenius norm of the effective matrix, computed without
// materializing it: sqrt(m) * a for conv kinds, a for FC layers.
double effective_f_norm(const LayerSpec& layer, const LayerNorms& norms);

}  // namespace convbound
