#include "convbound/complexity.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace convbound {

namespace {

void validate_layers(const ComplexityInputs& inputs) {
    if (inputs.layers.empty()) {
        throw DomainError("complexity needs at least one layer");
    }
    for (std::size_t i = 0; i < inputs.layers.size(); ++i) {
        const ComplexityLayer& l = inputs.layers[i];
        if (l.s == 0.0) {
            throw ZeroSpectralNorm("layer " + std::to_string(i + 1) +
                                   " has zero spectral norm");
        }
        if (!(l.s > 0.0) || !(l.rho > 0.0) || l.a < 0.0) {
            throw DomainError("layer " + std::to_string(i + 1) +
                              " needs s > 0, rho > 0, a >= 0");
        }
        if (l.is_conv) {
            if (l.c == 0 || l.r == 0 || l.d == 0 || l.d % l.c != 0) {
                throw DomainError("conv layer " + std::to_string(i + 1) +
                                  " needs c, r > 0 and d a multiple of c");
            }
        } else if (l.d_in == 0 || l.d_out == 0) {
            throw DomainError("fc layer " + std::to_string(i + 1) +
                              " needs positive dimensions");
        }
    }
}

double layer_term(const ComplexityLayer& l) {
    if (l.is_conv) {
        const double cr = static_cast<double>(l.c) * static_cast<double>(l.r);
        const double spatial = static_cast<double>(l.d) / static_cast<double>(l.c);
        return cr * cr * l.a * std::sqrt(spatial) / l.s;
    }
    const double din = static_cast<double>(l.d_in);
    const double dout = static_cast<double>(l.d_out);
    return dout * dout * din * din * l.a / l.s;
}

}  // namespace

double sensitive_complexity(const ComplexityInputs& inputs) {
    validate_layers(inputs);
    double prod = 2.0;
    double sum = 0.0;
    for (const ComplexityLayer& l : inputs.layers) {
        prod *= l.rho * l.s;
        sum += layer_term(l);
    }
    const double depth = static_cast<double>(inputs.layers.size());
    return prod * sum * depth * depth;
}

double sensitive_complexity_log10(const ComplexityInputs& inputs) {
    validate_layers(inputs);
    double log_prod = std::log10(2.0);
    double sum = 0.0;
    for (const ComplexityLayer& l : inputs.layers) {
        log_prod += std::log10(l.rho) + std::log10(l.s);
        sum += layer_term(l);
    }
    const double depth = static_cast<double>(inputs.layers.size());
    return log_prod + std::log10(sum) + 2.0 * std::log10(depth);
}

double complexity_fnn(std::span<const double> rho, std::span<const double> s,
                      std::span<const double> a, std::span<const std::size_t> widths) {
    const std::size_t depth = rho.size();
    if (s.size() != depth || a.size() != depth || widths.size() != depth + 1) {
        throw DimensionMismatch("per-layer sequences must share one depth");
    }
    ComplexityInputs inputs;
    inputs.layers.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        ComplexityLayer& l = inputs.layers[i];
        l.is_conv = false;
        l.rho = rho[i];
        l.s = s[i];
        l.a = a[i];
        l.d_in = widths[i];
        l.d_out = widths[i + 1];
    }
    return sensitive_complexity(inputs);
}

double complexity_fcnn(std::span<const double> rho, std::span<const double> s,
                       std::span<const double> a, std::span<const std::size_t> c,
                       std::span<const std::size_t> r, std::span<const std::size_t> d) {
    const std::size_t depth = rho.size();
    if (s.size() != depth || a.size() != depth || c.size() != depth || r.size() != depth ||
        d.size() != depth) {
        throw DimensionMismatch("per-layer sequences must share one depth");
    }
    ComplexityInputs inputs;
    inputs.layers.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        ComplexityLayer& l = inputs.layers[i];
        l.is_conv = true;
        l.rho = rho[i];
        l.s = s[i];
        l.a = a[i];
        l.c = c[i];
        l.r = r[i];
        l.d = d[i];
    }
    return sensitive_complexity(inputs);
}

double covering_ball_bound(std::size_t r, double a, double eps) {
    if (a < 0.0 || !(eps > 0.0)) {
        throw DomainError("need a >= 0 and eps > 0");
    }
    return static_cast<double>(r) * std::log1p(2.0 * a / eps);
}

double covering_fc_layer_bound(std::size_t d_in, std::size_t d_out, double a, double z_fnorm,
                               double eps) {
    if (a < 0.0 || z_fnorm < 0.0 || !(eps > 0.0)) {
        throw DomainError("need a, z >= 0 and eps > 0");
    }
    return static_cast<double>(d_in) * static_cast<double>(d_out) *
           std::log1p(2.0 * a * z_fnorm / eps);
}

double covering_conv_layer_bound(std::size_t c, std::size_t r, double a, std::size_t m,
                                 double z_fnorm, double eps) {
    if (a < 0.0 || z_fnorm < 0.0 || !(eps > 0.0) || m == 0) {
        throw DomainError("need a, z >= 0, eps > 0 and m >= 1");
    }
    return static_cast<double>(c) * static_cast<double>(r) *
           std::log1p(2.0 * a * std::sqrt(static_cast<double>(m)) * z_fnorm / eps);
}

double covering_network_bound(double x_fnorm, double complexity, double eps) {
    if (x_fnorm < 0.0 || complexity < 0.0 || !(eps > 0.0)) {
        throw DomainError("need x, R >= 0 and eps > 0");
    }
    return std::sqrt(x_fnorm * complexity / eps);
}

void validate_params(const BoundParams& params) {
    if (!(params.eta > 0.0)) {
        throw DomainError("eta must be positive");
    }
    if (!(params.delta > 0.0) || !(params.delta < 1.0)) {
        throw DomainError("delta must lie strictly inside (0, 1)");
    }
    if (params.n == 0) {
        throw DomainError("sample size must be at least 1");
    }
    if (params.x_fnorm < 0.0) {
        throw DomainError("input norm must be nonnegative");
    }
}

double rademacher_bound(const BoundParams& params, double complexity) {
    validate_params(params);
    if (complexity < 0.0) {
        throw DomainError("complexity must be nonnegative");
    }
    const double n = static_cast<double>(params.n);
    return 16.0 * std::pow(n, -0.625) *
           std::pow(2.0 * params.x_fnorm * complexity / params.eta, 0.25);
}

double generalization_bound(double empirical_risk, const BoundParams& params,
                            double complexity) {
    validate_params(params);
    if (empirical_risk < 0.0 || empirical_risk > 1.0) {
        throw DomainError("empirical risk must lie in [0, 1]");
    }
    if (complexity < 0.0) {
        throw DomainError("complexity must be nonnegative");
    }
    const double n = static_cast<double>(params.n);
    const double middle = 32.0 * std::pow(2.0 * params.x_fnorm * complexity / params.eta, 0.25) *
                          std::pow(n, -0.625);
    const double slack = 3.0 * std::sqrt(std::log(1.0 / params.delta) / (2.0 * n));
    return empirical_risk + middle + slack;
}

double margin(std::span<const double> logits, std::size_t label) {
    if (logits.size() < 2) {
        throw DomainError("margins need at least two classes");
    }
    if (label < 1 || label > logits.size()) {
        throw DomainError("label " + std::to_string(label) + " outside [1, " +
                          std::to_string(logits.size()) + "]");
    }
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < logits.size(); ++j) {
        if (j + 1 == label) {
            continue;
        }
        best_other = std::max(best_other, logits[j]);
    }
    return logits[label - 1] - best_other;
}

double ramp_loss(std::span<const double> logits, std::size_t label, double eta) {
    if (!(eta > 0.0)) {
        throw DomainError("eta must be positive");
    }
    const double r = -margin(logits, label);
    if (r < -eta) {
        return 0.0;
    }
    if (r > 0.0) {
        return 1.0;
    }
    return 1.0 + r / eta;
}

void validate_sample(const RiskSample& sample) {
    if (sample.logits.rows() < 2) {
        throw DomainError("samples need at least two classes");
    }
    if (sample.labels.size() != sample.logits.cols()) {
        throw DimensionMismatch("expected one label per logit column");
    }
    for (std::size_t label : sample.labels) {
        if (label < 1 || label > sample.logits.rows()) {
            throw DomainError("label " + std::to_string(label) + " out of range");
        }
    }
}

namespace {

// Kahan-compensated mean over the columns of a sample.
template <typename PerColumn>
double compensated_mean(const RiskSample& sample, PerColumn&& value) {
    const std::size_t n = sample.logits.cols();
    const std::size_t k = sample.logits.rows();
    std::vector<double> column(k);
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t j = 0; j < k; ++j) {
            column[j] = sample.logits(j, p);
        }
        const double term = value(std::span<const double>(column), sample.labels[p]);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(n);
}

}  // namespace

double empirical_ramp_risk(const RiskSample& sample, double eta) {
    validate_sample(sample);
    if (!(eta > 0.0)) {
        throw DomainError("eta must be positive");
    }
    return compensated_mean(sample, [eta](std::span<const double> logits, std::size_t label) {
        return ramp_loss(logits, label, eta);
    });
}

double empirical_zero_one_risk(const RiskSample& sample) {
    validate_sample(sample);
    return compensated_mean(sample, [](std::span<const double> logits, std::size_t label) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < logits.size(); ++j) {
            if (logits[j] > logits[arg]) {
                arg = j;
            }
        }
        return arg + 1 == label ? 0.0 : 1.0;
    });
}

}  // namespace convbound
