#include "convbound/lowering.hpp"

#include <string>
#include <unordered_set>

namespace convbound {

void validate_plan(const LoweringPlan& plan) {
    if (plan.input_dim == 0 || plan.filter_dim == 0) {
        throw DomainError("plan dimensions must be positive");
    }
    if (plan.sets.empty()) {
        throw DomainError("plan must contain at least one index set");
    }
    if (plan.stride == 0) {
        throw DomainError("stride must be at least 1");
    }
    for (std::size_t j = 0; j < plan.sets.size(); ++j) {
        const auto& set = plan.sets[j].indices;
        if (set.size() != plan.filter_dim) {
            throw DimensionMismatch("index set " + std::to_string(j + 1) + " has length " +
                                    std::to_string(set.size()) + ", expected " +
                                    std::to_string(plan.filter_dim));
        }
        std::unordered_set<std::size_t> seen;
        for (std::size_t idx : set) {
            if (idx < 1 || idx > plan.input_dim) {
                throw DomainError("index " + std::to_string(idx) + " outside [1, " +
                                  std::to_string(plan.input_dim) + "] in set " +
                                  std::to_string(j + 1));
            }
            if (!seen.insert(idx).second) {
                throw DomainError("duplicate index " + std::to_string(idx) + " in set " +
                                  std::to_string(j + 1));
            }
        }
    }
}

LoweringPlan plan_1d(std::size_t input_len, std::size_t k, std::size_t stride) {
    if (k == 0 || input_len == 0) {
        throw DomainError("filter and input lengths must be positive");
    }
    if (k > input_len) {
        throw FilterLargerThanInput("filter length " + std::to_string(k) +
                                    " exceeds input length " + std::to_string(input_len));
    }
    if (stride == 0) {
        throw DomainError("stride must be at least 1");
    }
    LoweringPlan plan;
    plan.input_dim = input_len;
    plan.filter_dim = k;
    plan.stride = stride;
    const std::size_t windows = (input_len - k) / stride + 1;
    plan.sets.reserve(windows);
    for (std::size_t j = 0; j < windows; ++j) {
        IndexSet set;
        set.indices.reserve(k);
        for (std::size_t t = 1; t <= k; ++t) {
            set.indices.push_back(stride * j + t);
        }
        plan.sets.push_back(std::move(set));
    }
    return plan;
}

LoweringPlan plan_2d(std::size_t h, std::size_t w, std::size_t kh, std::size_t kw,
                     std::size_t stride) {
    if (h == 0 || w == 0 || kh == 0 || kw == 0) {
        throw DomainError("input and filter extents must be positive");
    }
    if (kh > h || kw > w) {
        throw FilterLargerThanInput("filter " + std::to_string(kh) + "x" + std::to_string(kw) +
                                    " exceeds input " + std::to_string(h) + "x" +
                                    std::to_string(w));
    }
    if (stride == 0) {
        throw DomainError("stride must be at least 1");
    }
    LoweringPlan plan;
    plan.input_dim = h * w;
    plan.filter_dim = kh * kw;
    plan.stride = stride;
    for (std::size_t oi = 0; oi + kh <= h; oi += stride) {
        for (std::size_t oj = 0; oj + kw <= w; oj += stride) {
            IndexSet set;
            set.indices.reserve(kh * kw);
            for (std::size_t di = 0; di < kh; ++di) {
                for (std::size_t dj = 0; dj < kw; ++dj) {
                    set.indices.push_back((oi + di) * w + (oj + dj) + 1);
                }
            }
            plan.sets.push_back(std::move(set));
        }
    }
    return plan;
}

LoweringPlan pointwise_plan(std::size_t m, std::size_t c) {
    if (m == 0 || c == 0) {
        throw DomainError("pointwise plan needs positive spatial size and channel count");
    }
    // Channel-blocked input: spatial position p reads entry p of every
    // channel block.
    LoweringPlan plan;
    plan.input_dim = m * c;
    plan.filter_dim = c;
    plan.stride = 1;
    plan.sets.reserve(m);
    for (std::size_t p = 0; p < m; ++p) {
        IndexSet set;
        set.indices.reserve(c);
        for (std::size_t ch = 0; ch < c; ++ch) {
            set.indices.push_back(ch * m + p + 1);
        }
        plan.sets.push_back(std::move(set));
    }
    return plan;
}

ConvWeight make_standard_weight(DenseMatrix filters, std::size_t spatial_k,
                                std::size_t channels_in) {
    if (spatial_k == 0 || channels_in == 0) {
        throw DomainError("standard weight needs positive filter extent and channel count");
    }
    ConvWeight w{std::move(filters), ConvKind::standard, spatial_k, channels_in, 0};
    w.channels_out = w.filters.rows();
    return w;
}

ConvWeight make_depthwise_weight(DenseMatrix filters) {
    const std::size_t c = filters.rows();
    const std::size_t k = filters.cols();
    return ConvWeight{std::move(filters), ConvKind::depthwise, k, c, c};
}

ConvWeight make_pointwise_weight(DenseMatrix filters) {
    const std::size_t c_out = filters.rows();
    const std::size_t c_in = filters.cols();
    return ConvWeight{std::move(filters), ConvKind::pointwise, 1, c_in, c_out};
}

DenseMatrix gamma_standard(const ConvWeight& w, const LoweringPlan& plan) {
    if (w.filters.cols() != plan.filter_dim) {
        throw DimensionMismatch("filter dimension " + std::to_string(w.filters.cols()) +
                                " does not match plan filter dimension " +
                                std::to_string(plan.filter_dim));
    }
    const std::size_t c = w.filters.rows();
    const std::size_t m = plan.window_count();
    DenseMatrix out(c * m, plan.input_dim);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t row = i * m + j;
            const auto& set = plan.sets[j].indices;
            for (std::size_t t = 0; t < set.size(); ++t) {
                out(row, set[t] - 1) = w.filters(i, t);
            }
        }
    }
    return out;
}

DenseMatrix gamma_depthwise(const ConvWeight& w, const LoweringPlan& plan) {
    if (w.kind != ConvKind::depthwise) {
        throw DimensionMismatch("gamma_depthwise needs a depthwise weight");
    }
    if (w.filters.cols() != plan.filter_dim) {
        throw DimensionMismatch("filter dimension " + std::to_string(w.filters.cols()) +
                                " does not match plan filter dimension " +
                                std::to_string(plan.filter_dim));
    }
    const std::size_t c = w.filters.rows();
    const std::size_t m = plan.input_dim;        // per-channel spatial extent
    const std::size_t mp = plan.window_count();  // windows per channel
    DenseMatrix out(mp * c, m * c);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < mp; ++j) {
            const std::size_t row = i * mp + j;
            const auto& set = plan.sets[j].indices;
            for (std::size_t t = 0; t < set.size(); ++t) {
                out(row, i * m + set[t] - 1) = w.filters(i, t);
            }
        }
    }
    return out;
}

DenseMatrix gamma_pointwise(const ConvWeight& w, std::size_t m) {
    if (w.kind != ConvKind::pointwise) {
        throw DimensionMismatch("gamma_pointwise needs a pointwise weight");
    }
    if (m == 0) {
        throw DomainError("spatial size must be positive");
    }
    // Kronecker form W (x) I_m: block (i, ch) is W_{i,ch} times the identity,
    // matching the channel-blocked layout used by the depthwise lowering.
    const std::size_t c_out = w.filters.rows();
    const std::size_t c_in = w.filters.cols();
    DenseMatrix out(c_out * m, c_in * m);
    for (std::size_t i = 0; i < c_out; ++i) {
        for (std::size_t ch = 0; ch < c_in; ++ch) {
            const double v = w.filters(i, ch);
            if (v == 0.0) {
                continue;
            }
            for (std::size_t p = 0; p < m; ++p) {
                out(i * m + p, ch * m + p) = v;
            }
        }
    }
    return out;
}

DenseMatrix theta(const DenseMatrix& v, std::size_t m) {
    if (v.rows() != v.cols()) {
        throw NotSquare("theta needs a square matrix");
    }
    if (m == 0) {
        throw DomainError("block size must be positive");
    }
    const std::size_t n = v.rows();
    DenseMatrix out(n * m, n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double vij = v(i, j);
            if (vij == 0.0) {
                continue;
            }
            for (std::size_t p = 0; p < m; ++p) {
                out(i * m + p, j * m + p) = vij;
            }
        }
    }
    return out;
}

DenseMatrix mu_direct(const ConvWeight& w, const LoweringPlan& plan, const DenseMatrix& z) {
    if (w.filters.cols() != plan.filter_dim) {
        throw DimensionMismatch("filter dimension does not match plan");
    }
    const std::size_t c = w.filters.rows();
    const std::size_t windows = plan.window_count();
    const std::size_t n = z.cols();

    if (w.kind == ConvKind::depthwise) {
        const std::size_t m = plan.input_dim;
        if (z.rows() != m * c) {
            throw DimensionMismatch("depthwise input has " + std::to_string(z.rows()) +
                                    " rows, expected " + std::to_string(m * c));
        }
        DenseMatrix out(c * windows, n);
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < windows; ++j) {
                const auto& set = plan.sets[j].indices;
                const std::size_t row = i * windows + j;
                for (std::size_t p = 0; p < n; ++p) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t < set.size(); ++t) {
                        acc += w.filters(i, t) * z(i * m + set[t] - 1, p);
                    }
                    out(row, p) = acc;
                }
            }
        }
        return out;
    }

    // Standard and pointwise share the plain gather-and-dot form; pointwise
    // callers pass the plan from pointwise_plan.
    if (z.rows() != plan.input_dim) {
        throw DimensionMismatch("input has " + std::to_string(z.rows()) + " rows, expected " +
                                std::to_string(plan.input_dim));
    }
    DenseMatrix out(c * windows, n);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < windows; ++j) {
            const auto& set = plan.sets[j].indices;
            const std::size_t row = i * windows + j;
            for (std::size_t p = 0; p < n; ++p) {
                double acc = 0.0;
                for (std::size_t t = 0; t < set.size(); ++t) {
                    acc += w.filters(i, t) * z(set[t] - 1, p);
                }
                out(row, p) = acc;
            }
        }
    }
    return out;
}

}  // namespace convbound
