#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convbound/bundle.hpp"

namespace convbound {

struct PropertyResult {
    std::string name;
    std::size_t trials = 0;
    bool passed = true;
    std::string detail;  // first failure, empty when passed
};

// Runs the full oracle suite on seeded random instances: lowering
// equivalence for every convolution kind, the closed-form spectral and
// 2,1-norm bounds against the dense oracle, the Toeplitz structure and its
// eigenvalue bound, and the block-operator spectrum. The bundle's own
// layers are additionally checked for lowering equivalence and for
// bounded-mode norms dominating exact-mode norms.
std::vector<PropertyResult> run_verification(const NetBundle& bundle, std::size_t trials,
                                             std::uint64_t seed);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace convbound
