#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "markovscope/complex_matrix.hpp"

namespace mscope {

// Pivot magnitudes below this are treated as an exactly singular matrix.
inline constexpr double kSingularityThreshold = 1e-12;

// How far from Hermitian an input may be before the eigensolver refuses it.
inline constexpr double kHermiticityTolerance = 1e-8;

// Eigenvalues above -this are clamped to zero when taking PSD square roots.
inline constexpr double kPsdNegativeTolerance = 1e-10;

struct HermitianEigenSystem {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // unitary; column k belongs to eigenvalues[k]
};

// Cyclic Jacobi diagonalization for Hermitian matrices.  A complex
// off-diagonal pivot b = |b| e^{i phi} is annihilated by the plane rotation
//
//     J = [ c          -s e^{i phi} ]
//         [ s e^{-i phi}    c       ]
//
// with tan(2 theta) = |b| / Delta, Delta = (a_pp - a_qq) / 2, which reduces
// to the familiar real-symmetric update once the phase is factored out.
// Matrices here are at most 4x4, so rotations are applied as full matrix
// products rather than in-place row/column updates.
inline HermitianEigenSystem hermitian_eigensystem(const ComplexMatrix& m,
                                                  double hermiticity_tol = kHermiticityTolerance) {
    if (!m.is_square())
        throw std::invalid_argument("hermitian_eigensystem: matrix must be square");
    if (hermiticity_defect(m) > hermiticity_tol)
        throw std::domain_error("hermitian_eigensystem: input is not Hermitian within tolerance");

    const std::size_t n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(1.0, frobenius_norm(a));
    const int max_sweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-14 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double beta = std::abs(a(p, q));
                if (beta <= 1e-16 * scale) continue;
                const double phi = std::arg(a(p, q));
                const double delta = 0.5 * (a(p, p).real() - a(q, q).real());
                double t;
                if (delta == 0.0) {
                    t = 1.0;
                } else {
                    t = std::copysign(beta, delta) / (std::abs(delta) + std::hypot(delta, beta));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex phase = std::polar(1.0, phi);

                ComplexMatrix j = ComplexMatrix::identity(n);
                j(p, p) = c;
                j(p, q) = -s * phase;
                j(q, p) = s * std::conj(phase);
                j(q, q) = c;

                a = dagger(j) * a * j;
                v = v * j;
            }
        }
        a = hermitian_part(a);  // shed round-off drift between sweeps
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) > 1e-10 * scale)
            throw std::runtime_error("hermitian_eigensystem: Jacobi iteration failed to converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a(x, x).real() < a(y, y).real();
    });

    HermitianEigenSystem out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                                 double hermiticity_tol = kHermiticityTolerance) {
    return hermitian_eigensystem(m, hermiticity_tol).eigenvalues;
}

namespace detail {

// V diag(f) V^dagger for a spectral decomposition and per-eigenvalue factors.
inline ComplexMatrix recompose(const HermitianEigenSystem& es, const std::vector<Complex>& factors) {
    const std::size_t n = es.eigenvalues.size();
    ComplexMatrix scaled = es.eigenvectors;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= factors[k];
    return scaled * dagger(es.eigenvectors);
}

}  // namespace detail

// Gauss-Jordan inverse with partial pivoting.  Returns nothing when a pivot
// falls below the singularity threshold.
inline std::optional<ComplexMatrix> inverse(const ComplexMatrix& m,
                                            double singularity_threshold = kSingularityThreshold) {
    if (!m.is_square())
        throw std::invalid_argument("inverse: matrix must be square");
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(n);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(a(i, col)) > std::abs(a(pivot, col))) pivot = i;
        if (std::abs(a(pivot, col)) < singularity_threshold) return std::nullopt;

        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const Complex d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            const Complex f = a(i, col);
            if (f == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Principal square root of a positive semidefinite matrix.  Slightly negative
// eigenvalues (round-off from upstream products) are clamped to zero; anything
// below -negative_tolerance is a genuine contract violation.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m,
                              double negative_tolerance = kPsdNegativeTolerance) {
    const HermitianEigenSystem es = hermitian_eigensystem(m);
    std::vector<Complex> factors(es.eigenvalues.size());
    for (std::size_t k = 0; k < es.eigenvalues.size(); ++k) {
        const double lambda = es.eigenvalues[k];
        if (lambda < -negative_tolerance)
            throw std::domain_error("psd_sqrt: matrix has a negative eigenvalue beyond tolerance");
        factors[k] = std::sqrt(std::max(lambda, 0.0));
    }
    return detail::recompose(es, factors);
}

// exp(i theta g) for Hermitian g, via the spectral decomposition.  Always
// exactly unitary up to round-off since each eigenvalue maps to a phase.
inline ComplexMatrix exp_i_theta_hermitian(const ComplexMatrix& g, double theta) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("exp_i_theta_hermitian: theta must be finite");
    const HermitianEigenSystem es = hermitian_eigensystem(g);
    std::vector<Complex> factors(es.eigenvalues.size());
    for (std::size_t k = 0; k < es.eigenvalues.size(); ++k)
        factors[k] = std::polar(1.0, theta * es.eigenvalues[k]);
    return detail::recompose(es, factors);
}

}  // namespace mscope
