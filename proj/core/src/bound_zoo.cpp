#include "convbound/bound_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convbound/complexity.hpp"

namespace convbound {

const char* family_name(BoundFamily family) {
    switch (family) {
        case BoundFamily::neyshabur15: return "neyshabur15";
        case BoundFamily::bartlett_spectral17: return "bartlett_spectral17";
        case BoundFamily::neyshabur_pac17: return "neyshabur_pac17";
        case BoundFamily::golowich18: return "golowich18";
        case BoundFamily::li18: return "li18";
        case BoundFamily::ours: return "ours";
    }
    return "?";
}

namespace {

constexpr double kLog10Two = 0.30102999566398119521;

double log10_of(double v) { return std::log10(v); }

// min(n^{-1/4}, sqrt(L/n)) in base-10 log.
double depth_free_rate_log10(std::size_t L, std::size_t n) {
    const double ln = log10_of(static_cast<double>(n));
    const double ll = log10_of(static_cast<double>(L));
    return std::min(-0.25 * ln, 0.5 * (ll - ln));
}

FamilyValue make_value(BoundFamily family, double log10_value) {
    return FamilyValue{family, log10_value, std::pow(10.0, log10_value)};
}

void require_positive_spectral(const std::vector<LayerNorms>& norms) {
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i].s == 0.0) {
            throw ZeroSpectralNorm("layer " + std::to_string(i + 1) +
                                   " has zero spectral norm");
        }
    }
}

// The five competitor families share one evaluation once each layer's
// effective Frobenius norm gf_i is known; only "ours" differs between the
// table evaluators and the network pipeline.
struct CompetitorTerms {
    double slog = 0.0;       // sum log10 s_i
    double gflog = 0.0;      // sum log10 gf_i
    double sum_n21 = 0.0;    // sum (n21_i / s_i)^(2/3)
    double sum_fs2 = 0.0;    // sum (gf_i / s_i)^2
    double sum_as = 0.0;     // sum a_i / s_i
};

CompetitorTerms accumulate(const std::vector<LayerNorms>& norms,
                           const std::vector<double>& gf) {
    CompetitorTerms t;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        t.slog += log10_of(norms[i].s);
        t.gflog += log10_of(gf[i]);
        t.sum_n21 += std::pow(norms[i].n21 / norms[i].s, 2.0 / 3.0);
        const double fs = gf[i] / norms[i].s;
        t.sum_fs2 += fs * fs;
        t.sum_as += norms[i].a / norms[i].s;
    }
    return t;
}

double neyshabur15_log10(const CompetitorTerms& t, std::size_t L, double nhalf) {
    return static_cast<double>(L) * kLog10Two + t.gflog - nhalf;
}

double bartlett_log10(const CompetitorTerms& t, double nhalf) {
    return t.slog + 1.5 * log10_of(t.sum_n21) - nhalf;
}

double neyshabur_pac_log10(const CompetitorTerms& t, std::size_t L, std::size_t d_max,
                           double nhalf) {
    const double dl = static_cast<double>(L);
    return t.slog + 0.5 * log10_of(dl * dl * static_cast<double>(d_max) * t.sum_fs2) - nhalf;
}

double li_log10(const CompetitorTerms& t, std::size_t L, std::size_t d_max, double nhalf) {
    const double dm = static_cast<double>(d_max);
    return t.slog + 0.5 * log10_of(static_cast<double>(L) * dm * dm) - nhalf;
}

}  // namespace

BoundReport fnn_bounds(const std::vector<LayerNorms>& norms, std::size_t d_max, std::size_t L,
                       std::size_t n) {
    if (norms.empty() || norms.size() != L) {
        throw DimensionMismatch("depth must equal the number of per-layer norms");
    }
    if (d_max == 0 || n == 0) {
        throw DomainError("width and sample size must be positive");
    }
    require_positive_spectral(norms);

    std::vector<double> gf(L);
    for (std::size_t i = 0; i < L; ++i) {
        gf[i] = norms[i].a;
    }
    const CompetitorTerms t = accumulate(norms, gf);
    const double nhalf = 0.5 * log10_of(static_cast<double>(n));
    const double dl = static_cast<double>(L);
    const double dm = static_cast<double>(d_max);

    BoundReport report;
    report.mode = norms[0].mode;
    report.ignore_n = false;
    report.values = {
        make_value(BoundFamily::neyshabur15, neyshabur15_log10(t, L, nhalf)),
        make_value(BoundFamily::bartlett_spectral17, bartlett_log10(t, nhalf)),
        make_value(BoundFamily::neyshabur_pac17, neyshabur_pac_log10(t, L, d_max, nhalf)),
        make_value(BoundFamily::golowich18, t.gflog + depth_free_rate_log10(L, n)),
        make_value(BoundFamily::li18, li_log10(t, L, d_max, nhalf)),
        make_value(BoundFamily::ours,
                   0.25 * t.slog +
                       0.25 * log10_of(dl * dl * dm * dm * dm * dm * t.sum_as) - nhalf),
    };
    return report;
}

BoundReport fcnn_bounds(const std::vector<LayerNorms>& norms, std::size_t c, std::size_t m,
                        std::size_t r, std::size_t L, std::size_t n) {
    if (norms.empty() || norms.size() != L) {
        throw DimensionMismatch("depth must equal the number of per-layer norms");
    }
    if (c == 0 || m == 0 || r == 0 || n == 0) {
        throw DomainError("shape quantities and sample size must be positive");
    }
    require_positive_spectral(norms);

    const double sqrt_m = std::sqrt(static_cast<double>(m));
    std::vector<double> gf(L);
    for (std::size_t i = 0; i < L; ++i) {
        gf[i] = sqrt_m * norms[i].a;
    }
    const CompetitorTerms t = accumulate(norms, gf);
    const double nhalf = 0.5 * log10_of(static_cast<double>(n));
    const double dl = static_cast<double>(L);
    const double dc = static_cast<double>(c);
    const double dm = static_cast<double>(m);
    const std::size_t width = c * m;

    BoundReport report;
    report.mode = norms[0].mode;
    report.ignore_n = false;
    report.values = {
        make_value(BoundFamily::neyshabur15, neyshabur15_log10(t, L, nhalf)),
        make_value(BoundFamily::bartlett_spectral17, bartlett_log10(t, nhalf)),
        make_value(BoundFamily::neyshabur_pac17, neyshabur_pac_log10(t, L, width, nhalf)),
        make_value(BoundFamily::golowich18, t.gflog + depth_free_rate_log10(L, n)),
        make_value(BoundFamily::li18, li_log10(t, L, width, nhalf)),
        make_value(BoundFamily::ours,
                   0.25 * t.slog +
                       0.25 * log10_of(dl * dl * dc * dc * static_cast<double>(r) *
                                       static_cast<double>(r) * sqrt_m * t.sum_as) -
                       nhalf),
    };
    return report;
}

std::array<FamilyValue, 6> simplified_fnn_bounds(double a, double s, std::size_t d,
                                                 std::size_t L, std::size_t n) {
    if (!(a > 0.0) || !(s > 0.0) || d == 0 || L == 0 || n == 0) {
        throw DomainError("simplified bounds need positive inputs");
    }
    const double la = log10_of(a);
    const double ls = log10_of(s);
    const double ld = log10_of(static_cast<double>(d));
    const double ll = log10_of(static_cast<double>(L));
    const double dl = static_cast<double>(L);
    const double nhalf = 0.5 * log10_of(static_cast<double>(n));

    const double spectral_chain = (dl - 1.0) * ls + 1.5 * ll + la + 0.5 * ld - nhalf;
    return {
        make_value(BoundFamily::neyshabur15, dl * kLog10Two + dl * la - nhalf),
        make_value(BoundFamily::bartlett_spectral17, spectral_chain),
        make_value(BoundFamily::neyshabur_pac17, spectral_chain),
        make_value(BoundFamily::golowich18, dl * la + depth_free_rate_log10(L, n)),
        make_value(BoundFamily::li18, dl * ls + 0.5 * ll + ld - nhalf),
        make_value(BoundFamily::ours,
                   0.25 * (dl - 1.0) * ls + 0.75 * ll + 0.25 * la + ld - nhalf),
    };
}

std::array<FamilyValue, 6> simplified_fcnn_bounds(double a, double s, std::size_t c,
                                                  std::size_t m, std::size_t r, std::size_t L,
                                                  std::size_t n) {
    if (!(a > 0.0) || !(s > 0.0) || c == 0 || m == 0 || r == 0 || L == 0 || n == 0) {
        throw DomainError("simplified bounds need positive inputs");
    }
    const double la = log10_of(a);
    const double ls = log10_of(s);
    const double lc = log10_of(static_cast<double>(c));
    const double lm = log10_of(static_cast<double>(m));
    const double lr = log10_of(static_cast<double>(r));
    const double ll = log10_of(static_cast<double>(L));
    const double dl = static_cast<double>(L);
    const double nhalf = 0.5 * log10_of(static_cast<double>(n));

    const double spectral_chain = (dl - 1.0) * ls + 1.5 * ll + la + 0.5 * lc + lm - nhalf;
    return {
        make_value(BoundFamily::neyshabur15, dl * kLog10Two + dl * la + 0.5 * dl * lm - nhalf),
        make_value(BoundFamily::bartlett_spectral17, spectral_chain),
        make_value(BoundFamily::neyshabur_pac17, spectral_chain),
        make_value(BoundFamily::golowich18,
                   dl * la + 0.5 * dl * lm + depth_free_rate_log10(L, n)),
        make_value(BoundFamily::li18, dl * ls + 0.5 * ll + lc + lm - nhalf),
        make_value(BoundFamily::ours, 0.25 * (dl - 1.0) * ls + 0.75 * ll + 0.25 * la +
                                          0.5 * lc + 0.125 * lm + 0.5 * lr - nhalf),
    };
}

BoundReport architecture_comparison(const NetworkSpec& spec,
                                    const std::vector<LayerWeight>& weights, NormMode mode,
                                    bool ignore_n, std::size_t n) {
    require_valid(spec);
    if (weights.size() != spec.layers.size()) {
        throw DimensionMismatch("expected one weight per layer");
    }
    const std::size_t n_eff = ignore_n ? 1 : std::max<std::size_t>(n, 1);
    const std::size_t L = spec.depth();

    BoundReport report;
    report.mode = mode;
    report.ignore_n = ignore_n;

    std::vector<LayerNorms> norms(L);
    std::vector<double> gf(L);
    ComplexityInputs complexity;
    complexity.layers.resize(L);
    std::size_t d_max = 0;
    for (std::size_t i = 0; i < L; ++i) {
        const LayerSpec& layer = spec.layers[i];
        norms[i] = layer_norms(layer, weights[i], mode);
        gf[i] = effective_f_norm(layer, norms[i]);
        d_max = std::max(d_max, layer.d_out);
        report.layer_table.push_back({i + 1, layer.kind, norms[i]});

        ComplexityLayer& cl = complexity.layers[i];
        cl.rho = layer.lipschitz;
        cl.s = norms[i].s;
        cl.a = norms[i].a;
        switch (layer.kind) {
            case LayerKind::fully_connected:
                cl.is_conv = false;
                cl.d_in = layer.d_in;
                cl.d_out = layer.d_out;
                break;
            case LayerKind::standard_conv:
                cl.is_conv = true;
                cl.c = layer.c_out;
                cl.r = layer.spatial_k;
                cl.d = layer.d_out;
                break;
            case LayerKind::depthwise_conv:
                cl.is_conv = true;
                cl.c = layer.c_in;
                cl.r = layer.spatial_k;
                cl.d = layer.d_out;
                break;
            case LayerKind::pointwise_conv:
                cl.is_conv = true;
                cl.c = layer.c_out;
                cl.r = layer.c_in;
                cl.d = layer.d_out;
                break;
        }
    }
    require_positive_spectral(norms);

    const CompetitorTerms t = accumulate(norms, gf);
    const double nhalf = 0.5 * log10_of(static_cast<double>(n_eff));

    report.values = {
        make_value(BoundFamily::neyshabur15, neyshabur15_log10(t, L, nhalf)),
        make_value(BoundFamily::bartlett_spectral17, bartlett_log10(t, nhalf)),
        make_value(BoundFamily::neyshabur_pac17, neyshabur_pac_log10(t, L, d_max, nhalf)),
        make_value(BoundFamily::golowich18, t.gflog + depth_free_rate_log10(L, n_eff)),
        make_value(BoundFamily::li18, li_log10(t, L, d_max, nhalf)),
        // Quartic root of the sensitive complexity, with the n^(-5/8) rate of
        // the generalization bound's middle term.
        make_value(BoundFamily::ours,
                   0.25 * sensitive_complexity_log10(complexity) -
                       0.625 * log10_of(static_cast<double>(n_eff))),
    };
    std::sort(report.values.begin(), report.values.end(),
              [](const FamilyValue& x, const FamilyValue& y) {
                  return x.log10_value < y.log10_value;
              });
    return report;
}

}  // namespace convbound
