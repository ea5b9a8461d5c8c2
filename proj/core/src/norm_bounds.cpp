#include "convbound/norm_bounds.hpp"

#include <cmath>
#include <string>

#include "convbound/linalg.hpp"

namespace convbound {

namespace {

double row_l2(const DenseMatrix& m, std::size_t row) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        acc += m(row, j) * m(row, j);
    }
    return std::sqrt(acc);
}

void require_kind(const ConvWeight& w, ConvKind kind, const char* op) {
    if (w.kind != kind) {
        throw DimensionMismatch(std::string(op) + " applied to the wrong convolution kind");
    }
}

}  // namespace

double bound_standard(const ConvWeight& w, std::size_t m) {
    if (m == 0) {
        throw DomainError("window count must be at least 1");
    }
    return std::sqrt(static_cast<double>(m)) * frobenius_norm(w.filters);
}

double exact_depthwise_nonoverlap(const ConvWeight& w) {
    require_kind(w, ConvKind::depthwise, "exact_depthwise_nonoverlap");
    double best = 0.0;
    for (std::size_t i = 0; i < w.filters.rows(); ++i) {
        best = std::max(best, row_l2(w.filters, i));
    }
    return best;
}

double bound_depthwise_nonoverlap(const ConvWeight& w) {
    require_kind(w, ConvKind::depthwise, "bound_depthwise_nonoverlap");
    return frobenius_norm(w.filters);
}

double bound_depthwise_overlap(const ConvWeight& w) {
    require_kind(w, ConvKind::depthwise, "bound_depthwise_overlap");
    return norm_inf_row_l1(w.filters);
}

ToeplitzSpec toeplitz_sequence(const std::vector<double>& filter, std::size_t stride) {
    const std::size_t k = filter.size();
    if (k == 0) {
        throw DomainError("filter must be non-empty");
    }
    if (stride == 0) {
        throw DomainError("stride must be at least 1");
    }
    if (stride >= k) {
        throw NotOverlapping("stride " + std::to_string(stride) +
                             " does not overlap filter length " + std::to_string(k));
    }
    ToeplitzSpec spec;
    spec.band = (k + stride - 1) / stride;  // ceil(k / stride)
    spec.t.assign(spec.band + 1, 0.0);
    for (std::size_t s = 0; s <= spec.band; ++s) {
        const std::size_t shift = s * stride;
        if (shift >= k) {
            continue;  // empty overlap, t_s stays 0
        }
        double acc = 0.0;
        for (std::size_t j = 0; j + shift < k; ++j) {
            acc += filter[shift + j] * filter[j];
        }
        spec.t[s] = acc;
    }
    return spec;
}

double toeplitz_eig_bound(const ToeplitzSpec& spec) {
    if (spec.t.size() != spec.band + 1) {
        throw DimensionMismatch("generating sequence length must be band + 1");
    }
    double total = std::fabs(spec.t[0]);
    for (std::size_t s = 1; s <= spec.band; ++s) {
        total += 2.0 * std::fabs(spec.t[s]);
    }
    return total;
}

DenseMatrix toeplitz_matrix(const ToeplitzSpec& spec, std::size_t n) {
    if (spec.t.size() != spec.band + 1) {
        throw DimensionMismatch("generating sequence length must be band + 1");
    }
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t d = i > j ? i - j : j - i;
            if (d <= spec.band) {
                out(i, j) = spec.t[d];
            }
        }
    }
    return out;
}

double spectral_pointwise(const ConvWeight& w) {
    require_kind(w, ConvKind::pointwise, "spectral_pointwise");
    return spectral_norm_dense_oracle(w.filters);
}

double bound_21_fc(double a, std::size_t d_out) {
    if (a < 0.0) {
        throw DomainError("norm bound must be nonnegative");
    }
    return a * std::sqrt(static_cast<double>(d_out));
}

double bound_21_conv(double a, std::size_t m, std::size_t c) {
    if (a < 0.0) {
        throw DomainError("norm bound must be nonnegative");
    }
    return a * static_cast<double>(m) * std::sqrt(static_cast<double>(c));
}

double gamma_f_norm_standard(const ConvWeight& w, std::size_t m) {
    if (m == 0) {
        throw DomainError("window count must be at least 1");
    }
    return std::sqrt(static_cast<double>(m)) * frobenius_norm(w.filters);
}

}  // namespace convbound
