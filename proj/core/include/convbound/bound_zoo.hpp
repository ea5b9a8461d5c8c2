#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "convbound/network.hpp"

namespace convbound {

// The six bound families compared in the reports. Every value is the bare
// expression inside the source's asymptotic notation: unit constant, no log
// factors.
enum class BoundFamily {
    neyshabur15,
    bartlett_spectral17,
    neyshabur_pac17,
    golowich18,
    li18,
    ours,
};

inline constexpr std::array<BoundFamily, 6> kAllFamilies = {
    BoundFamily::neyshabur15,     BoundFamily::bartlett_spectral17,
    BoundFamily::neyshabur_pac17, BoundFamily::golowich18,
    BoundFamily::li18,            BoundFamily::ours,
};

const char* family_name(BoundFamily family);

// One family's value; the linear value overflows to inf for large networks
// while the log10 value stays finite.
struct FamilyValue {
    BoundFamily family = BoundFamily::ours;
    double log10_value = 0.0;
    double linear_value = 0.0;
};

struct LayerNormRow {
    std::size_t layer = 0;
    LayerKind kind = LayerKind::fully_connected;
    LayerNorms norms;
};

struct BoundReport {
    NormMode mode = NormMode::bounded;
    bool ignore_n = true;
    std::vector<FamilyValue> values;
    std::vector<LayerNormRow> layer_table;
};

// Bound values for a fully connected network from its per-layer norms,
// maximum width, depth, and sample size.
BoundReport fnn_bounds(const std::vector<LayerNorms>& norms, std::size_t d_max, std::size_t L,
                       std::size_t n);

// Bound values for a fully convolutional network with uniform channel count
// c, window count m, and filter dimension r across layers.
BoundReport fcnn_bounds(const std::vector<LayerNorms>& norms, std::size_t c, std::size_t m,
                        std::size_t r, std::size_t L, std::size_t n);

// Closed-form values under uniform per-layer norms (the simplification
// columns of the comparison tables).
std::array<FamilyValue, 6> simplified_fnn_bounds(double a, double s, std::size_t d,
                                                 std::size_t L, std::size_t n);
std::array<FamilyValue, 6> simplified_fcnn_bounds(double a, double s, std::size_t c,
                                                  std::size_t m, std::size_t r, std::size_t L,
                                                  std::size_t n);

// Full pipeline: per-layer norms in the requested mode, every family
// evaluated on them (competitors through their effective-matrix norms,
// "ours" through the sensitive complexity), report sorted ascending by
// log10 value. When ignore_n is set, all sample-size factors are dropped
// (evaluated at n = 1).
BoundReport architecture_comparison(const NetworkSpec& spec,
                                    const std::vector<LayerWeight>& weights, NormMode mode,
                                    bool ignore_n = true, std::size_t n = 1);

}  // namespace convbound
