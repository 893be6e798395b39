#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "markovscope/channel.hpp"
#include "markovscope/complex_matrix.hpp"
#include "markovscope/linalg.hpp"
#include "markovscope/parallel.hpp"
#include "markovscope/transfer.hpp"

namespace mscope {

// Eigenvalues of fidelity inputs may dip this far below zero before the
// matrix is rejected as not positive semidefinite.
inline constexpr double kFidelityPsdTolerance = 1e-9;

namespace detail {

inline void require_unit_trace_psd(const ComplexMatrix& rho, const char* who) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    if (std::abs(trace(rho) - Complex{1.0, 0.0}) > kFidelityPsdTolerance)
        throw std::domain_error(std::string(who) + ": matrix must have unit trace");
}

}  // namespace detail

// Fidelity F = (tr |sqrt(rho1) sqrt(rho2)|)^2 between unit-trace PSD
// matrices.  The trace norm is summed from singular values obtained through
// the Hermitian dilation [[0, A], [A^dag, 0]], whose spectrum is {+/- sigma}.
// Going through singular values of the root product instead of eigenvalues of
// the sandwich sqrt(rho1) rho2 sqrt(rho1) matters for accuracy: rank-deficient
// inputs give the sandwich exact zero eigenvalues, and round-off of size eps
// under a square root would smear each into sqrt(eps) ~ 1e-8 of spurious
// fidelity.  Singular values enter linearly, so the same round-off stays at
// eps.  Eigenvalues of the inputs slightly below zero are clamped; anything
// beyond the tolerance is rejected inside psd_sqrt.  The result is clamped
// into [0, 1].
inline double state_fidelity(const ChoiMatrix& rho1, const ChoiMatrix& rho2) {
    detail::require_unit_trace_psd(rho1.matrix, "state_fidelity");
    detail::require_unit_trace_psd(rho2.matrix, "state_fidelity");

    const ComplexMatrix root1 = psd_sqrt(rho1.matrix, kFidelityPsdTolerance);
    const ComplexMatrix root2 = psd_sqrt(rho2.matrix, kFidelityPsdTolerance);
    const ComplexMatrix product = root1 * root2;

    const std::size_t n = product.rows();
    ComplexMatrix dilation(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dilation(i, n + j) = product(i, j);
            dilation(n + j, i) = std::conj(product(i, j));
        }

    double trace_norm = 0.0;
    for (const double lambda : hermitian_eigenvalues(dilation))
        trace_norm += std::max(lambda, 0.0);
    const double f = trace_norm * trace_norm;
    return std::min(std::max(f, 0.0), 1.0);
}

// Bures distance D = sqrt(2 (1 - sqrt(F))).
inline double bures_distance(const ChoiMatrix& rho1, const ChoiMatrix& rho2) {
    const double f = state_fidelity(rho1, rho2);
    return std::sqrt(2.0 * std::max(0.0, 1.0 - std::sqrt(f)));
}

// One scan sample.  `p_or_t` is the mixing parameter for the static scan and
// the time for the time scan.
struct FidelityScanRow {
    double p_or_t = 0.0;
    double alpha = 0.0;
    double f_ideal_vs_noisy = 0.0;
    double f_identity_vs_noisy = 0.0;
};

namespace detail {

// Choi matrix of rho -> p rho + (1 - p) U rho U^dagger.
inline ChoiMatrix mixture_choi(double p, const ComplexMatrix& u) {
    WeightedKrausMap map;
    map.terms.push_back({p, ComplexMatrix::identity(2)});
    map.terms.push_back({1.0 - p, u});
    return choi_from_kraus_direct(map);
}

}  // namespace detail

// Static dephasing family along x: compares rho -> p rho + (1-p) U rho U^dag
// built with the imperfect gate against the same mixture with the exact
// sigma_x, and against the identity channel, over the uniform grid
// p in [0, 1] (inclusive) x alpha in [0, 2 pi) (half-open).  Rows are ordered
// p-major.
inline std::vector<FidelityScanRow> fidelity_scan_p_alpha(std::size_t p_points,
                                                          std::size_t alpha_points,
                                                          unsigned threads = 1) {
    if (p_points < 2 || alpha_points < 2)
        throw std::invalid_argument("fidelity_scan_p_alpha: need at least 2 points per axis");

    const ComplexMatrix ideal_gate = pauli(Axis::X);
    const ChoiMatrix identity_choi{maximally_entangled_state()};

    std::vector<FidelityScanRow> rows(p_points * alpha_points);
    parallel_for(rows.size(), threads, [&](std::size_t k) {
        const std::size_t p_idx = k / alpha_points;
        const std::size_t a_idx = k % alpha_points;
        const double p = static_cast<double>(p_idx) / static_cast<double>(p_points - 1);
        const double alpha =
            2.0 * std::numbers::pi * static_cast<double>(a_idx) / static_cast<double>(alpha_points);

        const ChoiMatrix noisy = detail::mixture_choi(p, perturbed_pauli(Axis::X, alpha));
        const ChoiMatrix ideal = detail::mixture_choi(p, ideal_gate);
        rows[k] = {p, alpha, state_fidelity(ideal, noisy), state_fidelity(identity_choi, noisy)};
    });
    return rows;
}

// Time-parametrized single x dephasing at constant rate gamma: for each
// requested angle and each time on the inclusive grid [0, t_max], fidelity of
// the imperfect-gate channel against the exact-gate channel and against the
// identity channel.  Rows are ordered alpha-major.
inline std::vector<FidelityScanRow> fidelity_vs_time(double gamma,
                                                     const std::vector<double>& alphas,
                                                     std::size_t t_points, double t_max,
                                                     unsigned threads = 1) {
    if (!std::isfinite(gamma) || gamma <= 0.0)
        throw std::invalid_argument("fidelity_vs_time: gamma must be positive");
    if (alphas.empty())
        throw std::invalid_argument("fidelity_vs_time: need at least one angle");
    if (t_points < 2)
        throw std::invalid_argument("fidelity_vs_time: need at least 2 time points");
    if (!std::isfinite(t_max) || t_max <= 0.0)
        throw std::invalid_argument("fidelity_vs_time: t_max must be positive");

    const ComplexMatrix ideal_gate = pauli(Axis::X);
    const ChoiMatrix identity_choi{maximally_entangled_state()};
    const RateSpec rate = RateSpec::constant(gamma);

    std::vector<FidelityScanRow> rows(alphas.size() * t_points);
    parallel_for(rows.size(), threads, [&](std::size_t k) {
        const std::size_t a_idx = k / t_points;
        const std::size_t t_idx = k % t_points;
        const double alpha = alphas[a_idx];
        const double t =
            t_max * static_cast<double>(t_idx) / static_cast<double>(t_points - 1);
        const double p = 0.5 * (1.0 + std::exp(-integrated_rate(rate, t)));

        const ChoiMatrix noisy = detail::mixture_choi(p, perturbed_pauli(Axis::X, alpha));
        const ChoiMatrix ideal = detail::mixture_choi(p, ideal_gate);
        rows[k] = {t, alpha, state_fidelity(ideal, noisy), state_fidelity(identity_choi, noisy)};
    });
    return rows;
}

}  // namespace mscope
