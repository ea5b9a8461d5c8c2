#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convbound/dense_matrix.hpp"

namespace convbound {

// One layer's contribution to the sensitive complexity. FC layers supply
// (d_in, d_out); conv layers supply (filters c, filter dimension r, output
// dimension d).
struct ComplexityLayer {
    bool is_conv = false;
    double rho = 1.0;  // Lipschitz constant of the activation
    double s = 0.0;    // spectral norm (or bound) of the effective matrix
    double a = 0.0;    // Frobenius norm (or bound) of the stored weight
    std::size_t d_in = 0;
    std::size_t d_out = 0;
    std::size_t c = 0;
    std::size_t r = 0;
    std::size_t d = 0;
};

struct ComplexityInputs {
    std::vector<ComplexityLayer> layers;
};

// Scalar capacity of a network:
//   (2 prod rho_i s_i) * (sum_FC d_i^2 d_{i-1}^2 a_i / s_i
//                         + sum_conv c_i^2 r_i^2 a_i sqrt(d_i/c_i) / s_i) * L^2.
// Throws ZeroSpectralNorm when any s_i is zero.
double sensitive_complexity(const ComplexityInputs& inputs);

// Same quantity in base-10 log, assembled so that the product never
// overflows even when the linear value would.
double sensitive_complexity_log10(const ComplexityInputs& inputs);

// All-FC and all-conv conveniences; they assemble the same inputs and call
// sensitive_complexity, so the specializations evaluate bit-identically.
double complexity_fnn(std::span<const double> rho, std::span<const double> s,
                      std::span<const double> a, std::span<const std::size_t> widths);
double complexity_fcnn(std::span<const double> rho, std::span<const double> s,
                       std::span<const double> a, std::span<const std::size_t> c,
                       std::span<const std::size_t> r, std::span<const std::size_t> d);

// log covering number of an l2 ball of radius a in r dimensions at scale eps.
double covering_ball_bound(std::size_t r, double a, double eps);

// log covering number of one fully connected layer's output set.
double covering_fc_layer_bound(std::size_t d_in, std::size_t d_out, double a, double z_fnorm,
                               double eps);

// log covering number of one convolutional layer's output set.
double covering_conv_layer_bound(std::size_t c, std::size_t r, double a, std::size_t m,
                                 double z_fnorm, double eps);

// log covering number of the whole network's output set.
double covering_network_bound(double x_fnorm, double complexity, double eps);

struct BoundParams {
    double eta = 1.0;      // margin scale, > 0
    double delta = 0.05;   // failure probability, in (0, 1)
    std::size_t n = 1;     // sample size
    double x_fnorm = 0.0;  // Frobenius norm of the stacked inputs
};

void validate_params(const BoundParams& params);

// Rademacher complexity bound: 16 n^{-5/8} (2 ||X||_F R / eta)^{1/4}.
double rademacher_bound(const BoundParams& params, double complexity);

// Explicit-constant generalization bound:
//   risk + 32 (2 ||X||_F R / eta)^{1/4} n^{-5/8} + 3 sqrt(ln(1/delta)/(2n)).
double generalization_bound(double empirical_risk, const BoundParams& params,
                            double complexity);

// Classification margin of one logit vector: score of the labelled class
// minus the best other score. Labels are 1-based.
double margin(std::span<const double> logits, std::size_t label);

// Margin-thresholded surrogate loss in [0, 1]: 0 above eta, 1 at or below 0,
// linear in between.
double ramp_loss(std::span<const double> logits, std::size_t label, double eta);

// Logits for n examples (one column each) with their 1-based labels.
struct RiskSample {
    DenseMatrix logits;  // k x n
    std::vector<std::size_t> labels;
};

void validate_sample(const RiskSample& sample);

// Mean ramp loss over the sample (compensated summation, so the result does
// not depend on evaluation order).
double empirical_ramp_risk(const RiskSample& sample, double eta);

// Fraction of columns whose argmax (ties to the smallest class index)
// differs from the label.
double empirical_zero_one_risk(const RiskSample& sample);

}  // namespace convbound
