#pragma once

#include <cstddef>
#include <vector>

#include "convbound/dense_matrix.hpp"

namespace convbound {

// Positions (1-based) of the input entries read by one sliding-window
// application of a filter.
struct IndexSet {
    std::vector<std::size_t> indices;
};

// The full set of window applications of one filter over a flattened input.
// Plans may also be built by hand for custom window patterns; validate_plan
// enforces the invariants either way.
struct LoweringPlan {
    std::size_t input_dim = 0;
    std::size_t filter_dim = 0;
    std::size_t stride = 1;
    std::vector<IndexSet> sets;

    std::size_t window_count() const noexcept { return sets.size(); }
};

// Checks index ranges, distinctness, and per-set length.
void validate_plan(const LoweringPlan& plan);

// 1-D sliding windows: window j covers positions stride*(j-1)+1 ...
// stride*(j-1)+k, for floor((input_len-k)/stride)+1 windows.
LoweringPlan plan_1d(std::size_t input_len, std::size_t k, std::size_t stride);

// 2-D sliding windows over a row-major flattened h x w input; window
// positions are traversed row-major and so are the entries inside a window.
LoweringPlan plan_2d(std::size_t h, std::size_t w, std::size_t kh, std::size_t kw,
                     std::size_t stride);

// Plan describing a 1x1 cross-channel filter applied at each of m spatial
// positions of a channel-blocked input (c blocks of m spatial values).
LoweringPlan pointwise_plan(std::size_t m, std::size_t c);

enum class ConvKind { standard, depthwise, pointwise };

// Convolutional weight: c filters of dimension r stored as the rows of a
// c x r matrix, plus the shape metadata needed to interpret them.
struct ConvWeight {
    DenseMatrix filters;  // c x r
    ConvKind kind = ConvKind::standard;
    std::size_t spatial_k = 0;
    std::size_t channels_in = 1;
    std::size_t channels_out = 1;
};

ConvWeight make_standard_weight(DenseMatrix filters, std::size_t spatial_k,
                                std::size_t channels_in = 1);
// One filter per channel, spatial dimension only.
ConvWeight make_depthwise_weight(DenseMatrix filters);
// c_out x c_in cross-channel mixing weight.
ConvWeight make_pointwise_weight(DenseMatrix filters);

// Fully connected matrix of a standard convolution: row (i-1)*m + j holds
// filter i scattered to the positions of window j; all other entries zero.
DenseMatrix gamma_standard(const ConvWeight& w, const LoweringPlan& plan);

// Block-diagonal fully connected matrix of a depthwise convolution. The plan
// covers a single channel's spatial extent; input and output are stored
// channel-block by channel-block.
DenseMatrix gamma_depthwise(const ConvWeight& w, const LoweringPlan& plan);

// Fully connected matrix of a pointwise convolution over m spatial
// positions: the Kronecker product of the channel-mixing matrix with I_m,
// under the channel-blocked layout on both sides.
DenseMatrix gamma_pointwise(const ConvWeight& w, std::size_t m);

// Block operator: (n*m x n*m) matrix whose (i,j) block is V_ij * I_m.
DenseMatrix theta(const DenseMatrix& v, std::size_t m);

// Direct convolution by gather-and-dot, never through a materialized gamma
// matrix. Output row (i-1)*windows + j, column p is the inner product of
// filter i with column p of z restricted to window j (restricted to filter
// i's channel block for depthwise weights).
DenseMatrix mu_direct(const ConvWeight& w, const LoweringPlan& plan, const DenseMatrix& z);

}  // namespace convbound
