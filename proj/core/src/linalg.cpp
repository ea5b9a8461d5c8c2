#include "convbound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>

#include "convbound/rng.hpp"

namespace convbound {

double frobenius_norm(const DenseMatrix& m) {
    double sum = 0.0;
    for (double v : m.data()) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

double norm_2_1(const DenseMatrix& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row += m(i, j) * m(i, j);
        }
        total += std::sqrt(row);
    }
    return total;
}

double norm_inf_row_l1(const DenseMatrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row += std::fabs(m(i, j));
        }
        best = std::max(best, row);
    }
    return best;
}

SpectralResult spectral_norm_power(const DenseMatrix& m, double tol,
                                   std::size_t max_iter, std::uint64_t seed) {
    if (!(tol > 0.0)) {
        throw DomainError("power iteration tolerance must be positive");
    }
    const std::size_t n = m.cols();

    Lcg64 rng(seed);
    std::vector<double> v(n);
    double norm = 0.0;
    for (double& x : v) {
        x = rng.next_symmetric();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0;
        norm = 1.0;
    }
    for (double& x : v) {
        x /= norm;
    }

    std::vector<double> y(m.rows());
    std::vector<double> w(n);
    SpectralResult res;
    double prev = -1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        res.iterations = it;
        // y = M v, w = M^T y
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += m(i, j) * v[j];
            }
            y[i] = acc;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double yi = y[i];
            if (yi == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                w[j] += m(i, j) * yi;
            }
        }
        // Rayleigh estimate of the top eigenvalue of M^T M (v is unit).
        double lambda = 0.0;
        double wnorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            lambda += v[j] * w[j];
            wnorm += w[j] * w[j];
        }
        wnorm = std::sqrt(wnorm);
        if (lambda <= 0.0 || wnorm == 0.0) {
            // The iterate was annihilated; the matrix (restricted to the
            // reachable subspace) is zero.
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        if (prev >= 0.0) {
            const double change = std::fabs(lambda - prev) / lambda;
            if (change < tol) {
                res.value = std::sqrt(lambda);
                res.converged = true;
                return res;
            }
        }
        prev = lambda;
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = w[j] / wnorm;
        }
    }
    res.value = prev > 0.0 ? std::sqrt(prev) : 0.0;
    res.converged = false;
    return res;
}

std::size_t oracle_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("CONVBOUND_ORACLE_CAP")) {
            const long parsed = std::atol(env);
            if (parsed > 0) {
                return static_cast<std::size_t>(parsed);
            }
        }
        return static_cast<std::size_t>(2048);
    }();
    return cap;
}

namespace {

// Cyclic Jacobi on a symmetric matrix; returns the unsorted diagonal.
// Rotations run until the off-diagonal Frobenius norm drops below
// 1e-14 * ||A||_F (or 100 sweeps, far beyond what quadratic convergence needs).
std::vector<double> jacobi_diagonalize(DenseMatrix a) {
    const std::size_t n = a.rows();
    double fro = frobenius_norm(a);
    const double target = 1e-14 * fro;

    for (std::size_t sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * a(p, q) * a(p, q);
            }
        }
        if (std::sqrt(off) <= target) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) {
                        t = -t;
                    }
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Rotate rows/columns p and q.
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = a(i, i);
    }
    return diag;
}

}  // namespace

double spectral_norm_dense_oracle(const DenseMatrix& m, std::size_t cap) {
    const std::size_t small = std::min(m.rows(), m.cols());
    if (small > cap) {
        throw OracleTooLarge("dense oracle invoked on min dimension " + std::to_string(small) +
                             " above cap " + std::to_string(cap));
    }
    // Gram matrix over the smaller side.
    const DenseMatrix& base = m;
    DenseMatrix gram(small, small);
    if (m.rows() <= m.cols()) {
        for (std::size_t i = 0; i < small; ++i) {
            for (std::size_t j = i; j < small; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < base.cols(); ++k) {
                    acc += base(i, k) * base(j, k);
                }
                gram(i, j) = acc;
                gram(j, i) = acc;
            }
        }
    } else {
        for (std::size_t i = 0; i < small; ++i) {
            for (std::size_t j = i; j < small; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < base.rows(); ++k) {
                    acc += base(k, i) * base(k, j);
                }
                gram(i, j) = acc;
                gram(j, i) = acc;
            }
        }
    }
    const std::vector<double> eig = jacobi_diagonalize(std::move(gram));
    double top = 0.0;
    for (double v : eig) {
        top = std::max(top, v);
    }
    return std::sqrt(std::max(top, 0.0));
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& m) {
    if (m.rows() != m.cols()) {
        throw NotSquare("symmetric eigenvalues need a square matrix");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            if (std::fabs(m(i, j) - m(j, i)) > 1e-12) {
                throw NotSymmetric("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") deviates from its transpose by more than 1e-12");
            }
        }
    }
    std::vector<double> eig = jacobi_diagonalize(m);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

}  // namespace convbound
