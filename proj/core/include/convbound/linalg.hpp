#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "convbound/dense_matrix.hpp"

namespace convbound {

// Outcome of the iterative spectral-norm engine.
struct SpectralResult {
    double value = 0.0;       // estimate of the largest singular value
    std::size_t iterations = 0;
    bool converged = false;
};

// sqrt of the sum of squared entries.
double frobenius_norm(const DenseMatrix& m);

// Sum over rows of the row l2 norms.
double norm_2_1(const DenseMatrix& m);

// Maximum over rows of the row l1 norms (induced infinity norm).
double norm_inf_row_l1(const DenseMatrix& m);

// Largest singular value by power iteration on M^T M. The start vector is
// drawn from a 64-bit LCG seeded with `seed`; the sweep stops once the
// relative change of the Rayleigh estimate drops below `tol`. Non-convergence
// within `max_iter` sweeps is reported through the result flag, not thrown.
SpectralResult spectral_norm_power(const DenseMatrix& m, double tol = 1e-10,
                                   std::size_t max_iter = 10000,
                                   std::uint64_t seed = 1);

// Size cap for the dense eigen-oracle. Defaults to 2048; the environment
// variable CONVBOUND_ORACLE_CAP overrides it (read once per process).
std::size_t oracle_cap();

// Brute-force largest singular value: forms the smaller Gram matrix of M and
// runs cyclic Jacobi until the off-diagonal Frobenius norm falls below
// 1e-14 times the input Frobenius norm. Throws OracleTooLarge when
// min(rows, cols) exceeds `cap`.
double spectral_norm_dense_oracle(const DenseMatrix& m, std::size_t cap = oracle_cap());

// Full spectrum of a symmetric matrix (Jacobi), sorted descending. The input
// must be symmetric within 1e-12 per entry.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& m);

}  // namespace convbound
