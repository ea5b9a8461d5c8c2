#pragma once

#include <cstddef>
#include <vector>

#include "convbound/lowering.hpp"

namespace convbound {

// Generating sequence t_0..t_b of a symmetric banded Toeplitz matrix, with
// t_s = 0 understood for s > b.
struct ToeplitzSpec {
    std::vector<double> t;  // length b + 1
    std::size_t band = 0;
};

// Spectral bound for standard convolution: sqrt(m) * ||W||_F where each
// filter performs m window applications.
double bound_standard(const ConvWeight& w, std::size_t m);

// Exact spectral norm of a depthwise lowering with disjoint windows:
// max_i ||w^i||_2.
double exact_depthwise_nonoverlap(const ConvWeight& w);

// Spectral bound for depthwise convolution with disjoint windows: ||W||_F.
double bound_depthwise_nonoverlap(const ConvWeight& w);

// Spectral bound for depthwise convolution with overlapping windows
// (stride < filter length): max row l1 norm of W.
double bound_depthwise_overlap(const ConvWeight& w);

// Generating sequence of the per-filter Gram matrix for an overlapping 1-D
// depthwise filter: t_s = sum_j w_{s*l+j} * w_j over the overlap, s = 0..b
// with band b = ceil(k/l). Requires stride < filter length.
ToeplitzSpec toeplitz_sequence(const std::vector<double>& filter, std::size_t stride);

// Eigenvalue bound for the symmetric banded Toeplitz family generated by the
// sequence: sum over |s| <= b of |t_|s||.
double toeplitz_eig_bound(const ToeplitzSpec& spec);

// Materialized n x n symmetric banded Toeplitz matrix of the sequence.
DenseMatrix toeplitz_matrix(const ToeplitzSpec& spec, std::size_t n);

// Exact spectral norm of a pointwise lowering: the spectral norm of the
// small channel-mixing matrix itself, independent of the spatial size.
double spectral_pointwise(const ConvWeight& w);

// 2,1-norm bound for a matrix with Frobenius norm at most a and d_out rows.
double bound_21_fc(double a, std::size_t d_out);

// 2,1-norm bound for the lowering of a convolutional weight with Frobenius
// norm at most a, c filters, and m window applications each.
double bound_21_conv(double a, std::size_t m, std::size_t c);

// Exact Frobenius norm of the standard lowering: sqrt(m) * ||W||_F.
double gamma_f_norm_standard(const ConvWeight& w, std::size_t m);

}  // namespace convbound
