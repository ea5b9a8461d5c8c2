#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "convbound/complexity.hpp"
#include "test_util.hpp"

using namespace convbound;
using namespace convbound::testutil;

namespace {

ComplexityLayer fc_entry(double rho, double s, double a, std::size_t d_in, std::size_t d_out) {
    ComplexityLayer l;
    l.is_conv = false;
    l.rho = rho;
    l.s = s;
    l.a = a;
    l.d_in = d_in;
    l.d_out = d_out;
    return l;
}

ComplexityLayer conv_entry(double rho, double s, double a, std::size_t c, std::size_t r,
                           std::size_t d) {
    ComplexityLayer l;
    l.is_conv = true;
    l.rho = rho;
    l.s = s;
    l.a = a;
    l.c = c;
    l.r = r;
    l.d = d;
    return l;
}

// Greedy packing of the radius-a ball in `dim` dimensions at separation eps.
// Any packing is no larger than the closed-form cover count, so its log is a
// lower witness for the bound.
std::size_t greedy_ball_packing(SplitMix64& rng, std::size_t dim, double a, double eps,
                                std::size_t samples) {
    std::vector<std::vector<double>> kept;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> p(dim);
        double norm2 = 0.0;
        for (double& x : p) {
            x = rng.next_range(-a, a);
            norm2 += x * x;
        }
        if (norm2 > a * a) {
            continue;
        }
        bool far = true;
        for (const auto& q : kept) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                d2 += (p[i] - q[i]) * (p[i] - q[i]);
            }
            if (d2 <= eps * eps) {
                far = false;
                break;
            }
        }
        if (far) {
            kept.push_back(std::move(p));
        }
    }
    return kept.size();
}

}  // namespace

TEST_CASE("sensitive complexity closed cases") {
    ComplexityInputs one_fc;
    one_fc.layers = {fc_entry(1.0, 1.0, 1.0, 1, 1)};
    CHECK(sensitive_complexity(one_fc) == doctest::Approx(2.0).epsilon(1e-14));

    ComplexityInputs zero_weight;
    zero_weight.layers = {fc_entry(1.0, 1.0, 0.0, 3, 2)};
    CHECK(sensitive_complexity(zero_weight) == 0.0);

    ComplexityInputs two_conv;
    two_conv.layers = {conv_entry(1.0, 1.0, 1.0, 2, 3, 8),
                       conv_entry(1.0, 1.0, 1.0, 2, 3, 8)};
    CHECK(sensitive_complexity(two_conv) == doctest::Approx(1152.0).epsilon(1e-14));
}

TEST_CASE("sensitive complexity rejects zero spectral norms") {
    ComplexityInputs bad;
    bad.layers = {fc_entry(1.0, 0.0, 1.0, 2, 2)};
    CHECK_THROWS_AS(sensitive_complexity(bad), ZeroSpectralNorm);
}

TEST_CASE("pure-architecture wrappers evaluate bit-identically") {
    const std::vector<double> rho = {1.0, 2.0, 0.5};
    const std::vector<double> s = {0.7, 1.3, 2.2};
    const std::vector<double> a = {1.1, 0.4, 3.0};
    const std::vector<std::size_t> widths = {5, 7, 3, 4};

    ComplexityInputs general;
    for (std::size_t i = 0; i < 3; ++i) {
        general.layers.push_back(fc_entry(rho[i], s[i], a[i], widths[i], widths[i + 1]));
    }
    CHECK(complexity_fnn(rho, s, a, widths) == sensitive_complexity(general));

    const std::vector<std::size_t> c = {2, 3, 4};
    const std::vector<std::size_t> r = {3, 5, 2};
    const std::vector<std::size_t> d = {8, 9, 16};
    ComplexityInputs conv;
    for (std::size_t i = 0; i < 3; ++i) {
        conv.layers.push_back(conv_entry(rho[i], s[i], a[i], c[i], r[i], d[i]));
    }
    CHECK(complexity_fcnn(rho, s, a, c, r, d) == sensitive_complexity(conv));

    CHECK(sensitive_complexity_log10(conv) ==
          doctest::Approx(std::log10(sensitive_complexity(conv))).epsilon(1e-12));
}

TEST_CASE("ball covering bound") {
    CHECK(covering_ball_bound(4, 0.0, 1.0) == 0.0);
    CHECK(covering_ball_bound(1, 1.0, 2.0) == doctest::Approx(std::log(2.0)));
    CHECK(covering_ball_bound(3, 1.0, 1.0) == doctest::Approx(3.0 * std::log(3.0)));

    SplitMix64 rng(300);
    const std::size_t packed = greedy_ball_packing(rng, 3, 1.0, 1.0, 4000);
    CHECK(packed >= 2);
    CHECK(std::log(static_cast<double>(packed)) <= covering_ball_bound(3, 1.0, 1.0));
}

TEST_CASE("layer covering bounds") {
    CHECK(covering_fc_layer_bound(3, 4, 0.0, 2.0, 1.0) == 0.0);
    CHECK(covering_fc_layer_bound(1, 1, 1.0, 1.0, 1.0) == doctest::Approx(std::log(3.0)));
    CHECK(covering_fc_layer_bound(2, 3, 1.0, 4.0, 1.0) >
          covering_fc_layer_bound(2, 3, 1.0, 2.0, 1.0));

    CHECK(covering_conv_layer_bound(2, 3, 0.0, 4, 2.0, 1.0) == 0.0);
    CHECK(covering_conv_layer_bound(1, 1, 1.0, 1, 1.0, 1.0) == doctest::Approx(std::log(3.0)));

    // With the FC radius inflated by sqrt(m), the two layer bounds differ by
    // exactly the parameter-count ratio m*d_in/r.
    const std::size_t c = 3, r = 4, m = 5, d_in = 24;
    const double a = 0.8, z = 2.5, eps = 0.3;
    const double conv = covering_conv_layer_bound(c, r, a, m, z, eps);
    const double fc = covering_fc_layer_bound(d_in, m * c, std::sqrt(5.0) * a, z, eps);
    CHECK(fc / conv == doctest::Approx(static_cast<double>(m) * d_in / r).epsilon(1e-12));
}

TEST_CASE("network covering bound") {
    CHECK(covering_network_bound(3.0, 0.0, 1.0) == 0.0);
    CHECK(covering_network_bound(4.0, 1.0, 1.0) == doctest::Approx(2.0));
    CHECK(covering_network_bound(4.0, 1.0, 0.25) ==
          doctest::Approx(2.0 * covering_network_bound(4.0, 1.0, 1.0)));
}

TEST_CASE("rademacher bound") {
    const BoundParams p{2.0, 0.5, 1, 1.0};
    CHECK(rademacher_bound(p, 0.0) == 0.0);
    CHECK(rademacher_bound(p, 1.0) == doctest::Approx(16.0).epsilon(1e-14));

    const BoundParams p16{2.0, 0.5, 16, 1.0};
    CHECK(rademacher_bound(p, 1.0) / rademacher_bound(p16, 1.0) ==
          doctest::Approx(std::pow(16.0, 0.625)).epsilon(1e-12));
}

TEST_CASE("generalization bound") {
    CHECK_THROWS_AS(generalization_bound(0.0, BoundParams{1.0, 1.0, 2, 1.0}, 0.0),
                    DomainError);
    CHECK_THROWS_AS(generalization_bound(1.5, BoundParams{1.0, 0.5, 2, 1.0}, 0.0),
                    DomainError);

    const BoundParams p{1.0, std::exp(-2.0), 2, 1.0};
    CHECK(generalization_bound(0.0, p, 0.0) ==
          doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));

    // The deviation term is exactly twice the Rademacher bound.
    const BoundParams q{0.7, 0.1, 37, 3.2};
    const double complexity = 5.5;
    const double slack = 3.0 * std::sqrt(std::log(1.0 / q.delta) / (2.0 * 37.0));
    CHECK(generalization_bound(0.0, q, complexity) - slack ==
          2.0 * rademacher_bound(q, complexity));
}

TEST_CASE("bound monotonicity grid") {
    const std::vector<double> complexities = {0.5, 1.0, 4.0};
    const std::vector<double> xs = {0.5, 2.0};
    const std::vector<double> etas = {0.5, 1.0, 2.0};
    const std::vector<std::size_t> ns = {2, 8, 64};
    for (double x : xs) {
        for (double eta : etas) {
            for (std::size_t n : ns) {
                for (std::size_t i = 0; i + 1 < complexities.size(); ++i) {
                    const BoundParams p{eta, 0.1, n, x};
                    CHECK(rademacher_bound(p, complexities[i]) <=
                          rademacher_bound(p, complexities[i + 1]));
                    CHECK(generalization_bound(0.0, p, complexities[i]) <=
                          generalization_bound(0.0, p, complexities[i + 1]));
                }
            }
        }
    }
    // Decreasing in eta and n.
    for (double r : complexities) {
        CHECK(rademacher_bound(BoundParams{0.5, 0.1, 4, 1.0}, r) >=
              rademacher_bound(BoundParams{1.0, 0.1, 4, 1.0}, r));
        CHECK(rademacher_bound(BoundParams{1.0, 0.1, 4, 1.0}, r) >=
              rademacher_bound(BoundParams{1.0, 0.1, 16, 1.0}, r));
    }
}

TEST_CASE("margin closed cases") {
    CHECK(margin(std::vector<double>{2.0, 1.0}, 1) == doctest::Approx(1.0));
    CHECK(margin(std::vector<double>{1.0, 1.0}, 2) == 0.0);
    CHECK(margin(std::vector<double>{0.0, 3.0, 5.0}, 2) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(margin(std::vector<double>{1.0}, 1), DomainError);
    CHECK_THROWS_AS(margin(std::vector<double>{1.0, 2.0}, 3), DomainError);
}

TEST_CASE("ramp loss branches") {
    const double eta = 0.8;
    // Confident correct, misclassified, half margin.
    CHECK(ramp_loss(std::vector<double>{2.0 * eta, 0.0}, 1, eta) == 0.0);
    CHECK(ramp_loss(std::vector<double>{-1.0, 0.0}, 1, eta) == 1.0);
    CHECK(ramp_loss(std::vector<double>{eta / 2.0, 0.0}, 1, eta) == doctest::Approx(0.5));
    // Boundary margins -eta, 0, eta map to 1, 1, 0.
    CHECK(ramp_loss(std::vector<double>{-eta, 0.0}, 1, eta) == 1.0);
    CHECK(ramp_loss(std::vector<double>{0.0, 0.0}, 1, eta) == 1.0);
    CHECK(ramp_loss(std::vector<double>{eta, 0.0}, 1, eta) == 0.0);
}

TEST_CASE("ramp loss is Lipschitz in the logits") {
    SplitMix64 rng(88);
    const double eta = 0.6;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 2 + rng.next_below(5);
        std::vector<double> u(k), v(k);
        for (std::size_t i = 0; i < k; ++i) {
            u[i] = rng.next_gaussian();
            v[i] = u[i] + 0.1 * rng.next_gaussian();
        }
        const std::size_t y = 1 + rng.next_below(k);
        double dist2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            dist2 += (u[i] - v[i]) * (u[i] - v[i]);
        }
        const double dist = std::sqrt(dist2);
        if (dist == 0.0) {
            continue;
        }
        const double lu = ramp_loss(u, y, eta);
        const double lv = ramp_loss(v, y, eta);
        CHECK(lu >= 0.0);
        CHECK(lu <= 1.0);
        const double slope = std::fabs(lu - lv) / dist;
        CHECK(slope <= 2.0 / eta + 1e-8);
    }
}

TEST_CASE("empirical risks") {
    // All margins at least eta: zero ramp risk.
    RiskSample confident{DenseMatrix(2, 3, {3.0, 4.0, 5.0, 0.0, 0.0, 0.0}),
                         {1, 1, 1}};
    CHECK(empirical_ramp_risk(confident, 1.0) == 0.0);
    CHECK(empirical_zero_one_risk(confident) == 0.0);

    RiskSample wrong{DenseMatrix(2, 2, {1.0, 1.0, 0.0, 0.0}), {2, 2}};
    CHECK(empirical_ramp_risk(wrong, 0.5) == 1.0);
    CHECK(empirical_zero_one_risk(wrong) == 1.0);

    // Half at margin eta, half misclassified at margin -eta.
    RiskSample half{DenseMatrix(2, 2, {1.0, -1.0, 0.0, 0.0}), {1, 1}};
    CHECK(empirical_ramp_risk(half, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("zero-one risk never exceeds ramp risk") {
    SplitMix64 rng(99);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 2 + rng.next_below(4);
        const std::size_t n = 1 + rng.next_below(12);
        RiskSample sample{random_matrix(rng, k, n), {}};
        sample.labels.resize(n);
        for (auto& y : sample.labels) {
            y = 1 + rng.next_below(k);
        }
        const double eta = 0.1 + rng.next_unit();
        CHECK(empirical_zero_one_risk(sample) <= empirical_ramp_risk(sample, eta) + 1e-14);
    }
}

TEST_CASE("risk means are evaluation-order independent") {
    SplitMix64 rng(111);
    const std::size_t k = 3, n = 64;
    RiskSample sample{random_matrix(rng, k, n), {}};
    sample.labels.resize(n);
    for (auto& y : sample.labels) {
        y = 1 + rng.next_below(k);
    }
    const double base = empirical_ramp_risk(sample, 0.7);

    // Reverse the sample and compare.
    RiskSample reversed{DenseMatrix(k, n), std::vector<std::size_t>(n)};
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t j = 0; j < k; ++j) {
            reversed.logits(j, n - 1 - p) = sample.logits(j, p);
        }
        reversed.labels[n - 1 - p] = sample.labels[p];
    }
    CHECK(std::fabs(empirical_ramp_risk(reversed, 0.7) - base) <= 1e-14);
}

TEST_CASE("argmax ties break toward the smallest class") {
    RiskSample tie{DenseMatrix(3, 1, {1.0, 1.0, 1.0}), {1}};
    CHECK(empirical_zero_one_risk(tie) == 0.0);
    tie.labels = {2};
    CHECK(empirical_zero_one_risk(tie) == 1.0);
}
