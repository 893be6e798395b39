#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "markovscope/channel.hpp"
#include "markovscope/complex_matrix.hpp"
#include "markovscope/linalg.hpp"

namespace mscope {

inline constexpr std::size_t kQubitDim = 2;

// Choi matrices whose Hermiticity defect exceeds this are considered
// numerically destroyed (typically by inverting a near-singular transfer
// matrix) rather than merely noisy, and are rejected.
inline constexpr double kChoiCorruptionThreshold = 1e-6;

// Matrix unit |k><l| in dimension n.
inline ComplexMatrix unit_matrix(std::size_t k, std::size_t l, std::size_t n = kQubitDim) {
    if (k >= n || l >= n)
        throw std::invalid_argument("unit_matrix: index out of range");
    ComplexMatrix g(n, n);
    g(k, l) = 1.0;
    return g;
}

// A qubit map written in the matrix-unit basis G_a = |k><l|, a = 2k + l:
// matrix(a, b) = Tr(G_a^dagger Map(G_b)).  Composition of maps is then
// ordinary matrix multiplication.
struct TransferMatrix {
    ComplexMatrix matrix;
};

// Choi state of a map, normalized to unit trace for trace-preserving input.
// Index layout pairs the reference (input) copy first: entry (2k + r, 2l + c)
// holds Map(|k><l|)[r][c] / 2.
struct ChoiMatrix {
    ComplexMatrix matrix;
};

// Unit-trace projector onto the maximally entangled state; this is the Choi
// matrix of the identity map.
inline ComplexMatrix maximally_entangled_state() {
    ComplexMatrix p(4, 4);
    p(0, 0) = p(0, 3) = p(3, 0) = p(3, 3) = 0.5;
    return p;
}

inline TransferMatrix transfer_from_map(const WeightedKrausMap& map) {
    TransferMatrix phi{ComplexMatrix(4, 4)};
    for (std::size_t k = 0; k < kQubitDim; ++k)
        for (std::size_t l = 0; l < kQubitDim; ++l) {
            const std::size_t beta = k * kQubitDim + l;
            const ComplexMatrix image = apply_map_linear(map, unit_matrix(k, l));
            for (std::size_t a = 0; a < kQubitDim; ++a)
                for (std::size_t b = 0; b < kQubitDim; ++b)
                    phi.matrix(a * kQubitDim + b, beta) = image(a, b);
        }
    return phi;
}

// Reshuffles a transfer matrix into the Choi matrix:
//   W = (1/2) sum_{a,b} Phi_{a,b} kron(G_b, G_a).
// The result is Hermitian for any map that is Hermiticity-preserving; the
// residual is measured and the output symmetrized so downstream eigensolves
// see an exactly Hermitian matrix.  A large residual means the transfer
// matrix itself is garbage and there is no point diagonalizing it.
inline ChoiMatrix choi_from_transfer(const TransferMatrix& phi) {
    if (phi.matrix.rows() != 4 || phi.matrix.cols() != 4)
        throw std::invalid_argument("choi_from_transfer: transfer matrix must be 4x4");
    ComplexMatrix w(4, 4);
    for (std::size_t a = 0; a < kQubitDim; ++a)
        for (std::size_t b = 0; b < kQubitDim; ++b)
            for (std::size_t k = 0; k < kQubitDim; ++k)
                for (std::size_t l = 0; l < kQubitDim; ++l)
                    w(kQubitDim * k + a, kQubitDim * l + b) =
                        0.5 * phi.matrix(kQubitDim * a + b, kQubitDim * k + l);
    if (!all_finite(w) || hermiticity_defect(w) > kChoiCorruptionThreshold)
        throw std::runtime_error("choi_from_transfer: Choi matrix is numerically corrupted");
    return ChoiMatrix{hermitian_part(w)};
}

// Choi matrix assembled straight from the Kraus form, without the transfer
// matrix in between.  Kept as an independent route so the two constructions
// can be checked against each other.
inline ChoiMatrix choi_from_kraus_direct(const WeightedKrausMap& map) {
    ComplexMatrix w(4, 4);
    for (std::size_t k = 0; k < kQubitDim; ++k)
        for (std::size_t l = 0; l < kQubitDim; ++l) {
            const ComplexMatrix image = apply_map_linear(map, unit_matrix(k, l));
            for (std::size_t r = 0; r < kQubitDim; ++r)
                for (std::size_t c = 0; c < kQubitDim; ++c)
                    w(kQubitDim * k + r, kQubitDim * l + c) = 0.5 * image(r, c);
        }
    return ChoiMatrix{hermitian_part(w)};
}

// Two-point propagator Phi(t, s) = Phi(t) Phi(s)^{-1}, or nothing when
// Phi(s) is singular at the given threshold.
inline std::optional<TransferMatrix> propagator_transfer(
    const TransferMatrix& phi_t, const TransferMatrix& phi_s,
    double singularity_threshold = kSingularityThreshold) {
    const std::optional<ComplexMatrix> inv = inverse(phi_s.matrix, singularity_threshold);
    if (!inv) return std::nullopt;
    return TransferMatrix{phi_t.matrix * (*inv)};
}

// Partial trace over the first (reference) factor of a 4x4 bipartite matrix;
// for a Choi matrix this yields Map(I)/2.
inline ComplexMatrix partial_trace_first(const ComplexMatrix& w) {
    if (w.rows() != 4 || w.cols() != 4)
        throw std::invalid_argument("partial_trace_first: matrix must be 4x4");
    ComplexMatrix out(kQubitDim, kQubitDim);
    for (std::size_t r = 0; r < kQubitDim; ++r)
        for (std::size_t c = 0; c < kQubitDim; ++c)
            for (std::size_t k = 0; k < kQubitDim; ++k)
                out(r, c) += w(kQubitDim * k + r, kQubitDim * k + c);
    return out;
}

// Partial trace over the second (output) factor; identity/2 for any
// trace-preserving map.
inline ComplexMatrix partial_trace_second(const ComplexMatrix& w) {
    if (w.rows() != 4 || w.cols() != 4)
        throw std::invalid_argument("partial_trace_second: matrix must be 4x4");
    ComplexMatrix out(kQubitDim, kQubitDim);
    for (std::size_t k = 0; k < kQubitDim; ++k)
        for (std::size_t l = 0; l < kQubitDim; ++l)
            for (std::size_t r = 0; r < kQubitDim; ++r)
                out(k, l) += w(kQubitDim * k + r, kQubitDim * l + r);
    return out;
}

}  // namespace mscope
