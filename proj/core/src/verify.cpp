#include "convbound/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "convbound/linalg.hpp"
#include "convbound/norm_bounds.hpp"
#include "convbound/rng.hpp"

namespace convbound {

namespace {

DenseMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) {
        v = rng.next_gaussian();
    }
    return m;
}

double relative_fro_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        diff += d * d;
        ref += b.data()[i] * b.data()[i];
    }
    if (ref == 0.0) {
        return std::sqrt(diff);
    }
    return std::sqrt(diff / ref);
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using TrialFn = std::function<std::string(SplitMix64&)>;

PropertyResult run_property(const std::string& name, std::size_t trials, std::uint64_t seed,
                            const TrialFn& trial) {
    PropertyResult res;
    res.name = name;
    res.trials = trials;
    SplitMix64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::string failure = trial(rng);
        if (!failure.empty()) {
            res.passed = false;
            res.detail = "trial " + std::to_string(t + 1) + ": " + std::move(failure);
            break;
        }
    }
    return res;
}

// Shared draw helpers keep trial shapes at oracle-friendly sizes.
struct StandardDraw {
    ConvWeight w;
    LoweringPlan plan;
};

StandardDraw draw_standard(SplitMix64& rng, bool two_dee) {
    if (two_dee) {
        const std::size_t h = 3 + rng.next_below(5);
        const std::size_t wd = 3 + rng.next_below(5);
        const std::size_t kh = 1 + rng.next_below(std::min<std::size_t>(h, 3));
        const std::size_t kw = 1 + rng.next_below(std::min<std::size_t>(wd, 3));
        const std::size_t stride = 1 + rng.next_below(2);
        const std::size_t c = 1 + rng.next_below(4);
        LoweringPlan plan = plan_2d(h, wd, kh, kw, stride);
        ConvWeight w = make_standard_weight(random_matrix(rng, c, kh * kw), kh * kw);
        return {std::move(w), std::move(plan)};
    }
    const std::size_t len = 6 + rng.next_below(30);
    const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(len, 6));
    const std::size_t stride = 1 + rng.next_below(3);
    const std::size_t c = 1 + rng.next_below(5);
    LoweringPlan plan = plan_1d(len, k, stride);
    ConvWeight w = make_standard_weight(random_matrix(rng, c, k), k);
    return {std::move(w), std::move(plan)};
}

StandardDraw draw_depthwise(SplitMix64& rng, bool overlapping) {
    const std::size_t k = 2 + rng.next_below(4);
    const std::size_t stride = overlapping ? 1 + rng.next_below(k - 1) : k + rng.next_below(3);
    const std::size_t len = k + stride * (1 + rng.next_below(8));
    const std::size_t c = 1 + rng.next_below(5);
    LoweringPlan plan = plan_1d(len, k, stride);
    ConvWeight w = make_depthwise_weight(random_matrix(rng, c, k));
    return {std::move(w), std::move(plan)};
}

}  // namespace

std::vector<PropertyResult> run_verification(const NetBundle& bundle, std::size_t trials,
                                             std::uint64_t seed) {
    std::vector<PropertyResult> results;
    std::uint64_t stream = seed;
    const auto next_stream = [&stream] { return ++stream; };

    const auto equivalence_failure = [](const DenseMatrix& direct, const DenseMatrix& lowered,
                                        const DenseMatrix& z) -> std::string {
        const DenseMatrix product = multiply(lowered, z);
        const double rel = relative_fro_diff(direct, product);
        if (rel > 1e-13) {
            return "direct and lowered products differ by " + num(rel);
        }
        return {};
    };

    results.push_back(run_property(
        "lowering_equivalence_standard_1d", trials, next_stream(), [&](SplitMix64& rng) {
            auto [w, plan] = draw_standard(rng, false);
            const DenseMatrix z = random_matrix(rng, plan.input_dim, 1 + rng.next_below(4));
            return equivalence_failure(mu_direct(w, plan, z), gamma_standard(w, plan), z);
        }));
    results.push_back(run_property(
        "lowering_equivalence_standard_2d", trials, next_stream(), [&](SplitMix64& rng) {
            auto [w, plan] = draw_standard(rng, true);
            const DenseMatrix z = random_matrix(rng, plan.input_dim, 1 + rng.next_below(4));
            return equivalence_failure(mu_direct(w, plan, z), gamma_standard(w, plan), z);
        }));
    results.push_back(run_property(
        "lowering_equivalence_depthwise_overlap", trials, next_stream(), [&](SplitMix64& rng) {
            auto [w, plan] = draw_depthwise(rng, true);
            const DenseMatrix z = random_matrix(
                rng, plan.input_dim * w.filters.rows(), 1 + rng.next_below(4));
            return equivalence_failure(mu_direct(w, plan, z), gamma_depthwise(w, plan), z);
        }));
    results.push_back(run_property(
        "lowering_equivalence_depthwise_nonoverlap", trials, next_stream(),
        [&](SplitMix64& rng) {
            auto [w, plan] = draw_depthwise(rng, false);
            const DenseMatrix z = random_matrix(
                rng, plan.input_dim * w.filters.rows(), 1 + rng.next_below(4));
            return equivalence_failure(mu_direct(w, plan, z), gamma_depthwise(w, plan), z);
        }));
    results.push_back(run_property(
        "lowering_equivalence_pointwise", trials, next_stream(), [&](SplitMix64& rng) {
            const std::size_t c = 1 + rng.next_below(6);
            const std::size_t cp = 1 + rng.next_below(6);
            const std::size_t m = 1 + rng.next_below(8);
            ConvWeight w = make_pointwise_weight(random_matrix(rng, cp, c));
            const LoweringPlan plan = pointwise_plan(m, c);
            const DenseMatrix z = random_matrix(rng, m * c, 1 + rng.next_below(4));
            return equivalence_failure(mu_direct(w, plan, z), gamma_pointwise(w, m), z);
        }));

    results.push_back(run_property(
        "standard_spectral_bound", trials, next_stream(), [&](SplitMix64& rng) -> std::string {
            auto [w, plan] = draw_standard(rng, rng.next_below(2) == 0);
            const double oracle = spectral_norm_dense_oracle(gamma_standard(w, plan));
            const double bound = bound_standard(w, plan.window_count());
            if (oracle > bound + 1e-10) {
                return "oracle " + num(oracle) + " exceeds bound " +
                       num(bound);
            }
            return {};
        }));
    results.push_back(run_property(
        "depthwise_nonoverlap_exact_and_bound", trials, next_stream(),
        [&](SplitMix64& rng) -> std::string {
            auto [w, plan] = draw_depthwise(rng, false);
            const double oracle = spectral_norm_dense_oracle(gamma_depthwise(w, plan));
            const double exact = exact_depthwise_nonoverlap(w);
            const double bound = bound_depthwise_nonoverlap(w);
            if (std::fabs(oracle - exact) > 1e-10) {
                return "oracle and closed form differ: " + num(oracle) + " vs " +
                       num(exact);
            }
            if (oracle > bound + 1e-10) {
                return "oracle exceeds the Frobenius bound";
            }
            return {};
        }));
    results.push_back(run_property(
        "depthwise_overlap_bound", trials, next_stream(), [&](SplitMix64& rng) -> std::string {
            auto [w, plan] = draw_depthwise(rng, true);
            const double oracle = spectral_norm_dense_oracle(gamma_depthwise(w, plan));
            const double bound = bound_depthwise_overlap(w);
            if (oracle > bound + 1e-10) {
                return "oracle " + num(oracle) + " exceeds bound " +
                       num(bound);
            }
            return {};
        }));
    results.push_back(run_property(
        "pointwise_spectral_equality", trials, next_stream(),
        [&](SplitMix64& rng) -> std::string {
            const std::size_t c = 1 + rng.next_below(8);
            const std::size_t cp = 1 + rng.next_below(8);
            const std::size_t m = 1 + rng.next_below(8);
            ConvWeight w = make_pointwise_weight(random_matrix(rng, cp, c));
            const double oracle = spectral_norm_dense_oracle(gamma_pointwise(w, m));
            const double small = spectral_pointwise(w);
            const double scale = std::max({oracle, small, 1e-30});
            if (std::fabs(oracle - small) / scale > 1e-10) {
                return "lowered and small-matrix spectral norms differ: " +
                       num(oracle) + " vs " + num(small);
            }
            return {};
        }));
    results.push_back(run_property(
        "fc_21_bound", trials, next_stream(), [&](SplitMix64& rng) -> std::string {
            const std::size_t rows = 1 + rng.next_below(12);
            const std::size_t cols = 1 + rng.next_below(12);
            const DenseMatrix a = random_matrix(rng, rows, cols);
            if (norm_2_1(a) > bound_21_fc(frobenius_norm(a), rows) + 1e-12) {
                return "2,1-norm exceeds its bound";
            }
            return {};
        }));
    results.push_back(run_property(
        "conv_21_bound", trials, next_stream(), [&](SplitMix64& rng) -> std::string {
            auto [w, plan] = draw_standard(rng, false);
            const DenseMatrix g = gamma_standard(w, plan);
            const double bound = bound_21_conv(frobenius_norm(w.filters), plan.window_count(),
                                               w.filters.rows());
            if (norm_2_1(g) > bound + 1e-12) {
                return "2,1-norm of the lowering exceeds its bound";
            }
            return {};
        }));

    results.push_back(run_property(
        "toeplitz_structure_and_bound", trials, next_stream(),
        [&](SplitMix64& rng) -> std::string {
            const std::size_t k = 2 + rng.next_below(4);
            const std::size_t stride = 1 + rng.next_below(k - 1);
            std::vector<double> filter(k);
            for (double& v : filter) {
                v = rng.next_gaussian();
            }
            const std::size_t len = k + stride * (2 + rng.next_below(10));
            const LoweringPlan plan = plan_1d(len, k, stride);
            ConvWeight w = make_depthwise_weight(DenseMatrix(1, k, filter));
            const DenseMatrix omega = gamma_depthwise(w, plan);
            const DenseMatrix gram = multiply(omega, transpose(omega));
            const ToeplitzSpec spec = toeplitz_sequence(filter, stride);
            for (std::size_t p = 0; p < gram.rows(); ++p) {
                for (std::size_t q = 0; q < gram.cols(); ++q) {
                    const std::size_t d = p > q ? p - q : q - p;
                    const double expect = d <= spec.band ? spec.t[d] : 0.0;
                    const double scale = std::max(std::fabs(expect), 1.0);
                    if (std::fabs(gram(p, q) - expect) > 1e-13 * scale) {
                        return "gram matrix deviates from its generating sequence";
                    }
                }
            }
            const double bound = toeplitz_eig_bound(spec);
            const std::size_t order = 3 + rng.next_below(18);
            const auto eig = symmetric_eigenvalues(toeplitz_matrix(spec, order));
            if (!eig.empty() && eig.front() > bound + 1e-10) {
                return "eigenvalue exceeds the banded Toeplitz bound";
            }
            return {};
        }));
    results.push_back(run_property(
        "theta_similarity", trials, next_stream(), [&](SplitMix64& rng) -> std::string {
            const std::size_t n = 1 + rng.next_below(6);
            const std::size_t m = 1 + rng.next_below(5);
            const DenseMatrix b = random_matrix(rng, n, n);
            const DenseMatrix v = multiply(b, transpose(b));  // PSD
            const auto base = symmetric_eigenvalues(v);
            const auto lifted = symmetric_eigenvalues(theta(v, m));
            for (std::size_t i = 0; i < base.size(); ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const double got = lifted[i * m + j];
                    if (std::fabs(got - base[i]) > 1e-10 * std::max(1.0, std::fabs(base[i]))) {
                        return "spectrum is not the base spectrum with multiplicity";
                    }
                }
            }
            return {};
        }));

    // Bundle-specific checks: lowering equivalence on the bundle's own conv
    // layers and bounded norms dominating exact norms.
    results.push_back(run_property(
        "bundle_layer_consistency", 1, next_stream(), [&](SplitMix64& rng) -> std::string {
            for (std::size_t i = 0; i < bundle.spec.layers.size(); ++i) {
                const LayerSpec& layer = bundle.spec.layers[i];
                const LayerNorms exact = layer_norms(layer, bundle.weights[i], NormMode::exact);
                const LayerNorms bounded =
                    layer_norms(layer, bundle.weights[i], NormMode::bounded);
                if (exact.s > bounded.s + 1e-10) {
                    return "layer " + std::to_string(i + 1) +
                           ": exact spectral norm exceeds its bound";
                }
                if (exact.n21 > bounded.n21 + 1e-10) {
                    return "layer " + std::to_string(i + 1) +
                           ": exact 2,1-norm exceeds its bound";
                }
                if (layer.kind == LayerKind::fully_connected) {
                    continue;
                }
                const auto& w = std::get<ConvWeight>(bundle.weights[i]);
                const DenseMatrix eff = effective_matrix(layer, bundle.weights[i]);
                const DenseMatrix z = random_matrix(rng, layer.d_in, 2);
                const DenseMatrix direct = mu_direct(w, layer_plan(layer), z);
                if (!equivalence_failure(direct, eff, z).empty()) {
                    return "layer " + std::to_string(i + 1) +
                           ": direct convolution disagrees with its lowering";
                }
            }
            return {};
        }));

    return results;
}

bool all_passed(const std::vector<PropertyResult>& results) {
    for (const auto& r : results) {
        if (!r.passed) {
            return false;
        }
    }
    return true;
}

}  // namespace convbound
