#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "markovscope/channel.hpp"
#include "markovscope/linalg.hpp"
#include "markovscope/parallel.hpp"
#include "markovscope/transfer.hpp"

namespace mscope {

// Default decision tolerance for eigenvalue-sign verdicts.  Deliberately
// looser than the linear-algebra tolerances (1e-10 .. 1e-12) so round-off in
// the kernels cannot manufacture a spurious violation.
inline constexpr double kVerdictTolerance = 1e-9;

// Uniform time grid: points+1 samples {i * t_max / points : i = 0..points}
// covering [0, t_max], so the spacing is exactly t_max / points and doubling
// `points` yields a strict superset of the sample times.
struct TimeGrid {
    double t_max = 5.0;
    std::size_t points = 200;

    std::vector<double> values() const {
        if (!std::isfinite(t_max) || t_max <= 0.0)
            throw std::invalid_argument("TimeGrid: t_max must be finite and positive");
        if (points == 0)
            throw std::invalid_argument("TimeGrid: points must be positive");
        const double delta = t_max / static_cast<double>(points);
        std::vector<double> out(points + 1);
        for (std::size_t i = 0; i <= points; ++i) out[i] = delta * static_cast<double>(i);
        return out;
    }
};

enum class Verdict { Markovian, NonMarkovian, NotInvertible };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Markovian: return "Markovian";
        case Verdict::NonMarkovian: return "NonMarkovian";
        case Verdict::NotInvertible: return "NotInvertible";
    }
    throw std::invalid_argument("verdict_name: unknown verdict");
}

// One evaluated (t, s) pair: eigenvalues of the propagator's Choi matrix,
// ascending.
struct EigenvalueRow {
    double t = 0.0;
    double s = 0.0;
    std::array<double, 4> eigenvalues{};
};

enum class SkipReason { SingularTransfer, CorruptedChoi };

struct SkippedPair {
    double t = 0.0;
    double s = 0.0;
    SkipReason reason = SkipReason::SingularTransfer;
};

struct DivisibilityReport {
    Verdict verdict = Verdict::Markovian;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double argmin_t = std::numeric_limits<double>::quiet_NaN();
    double argmin_s = std::numeric_limits<double>::quiet_NaN();
    double tolerance_used = kVerdictTolerance;
    std::vector<EigenvalueRow> eigenvalue_trace;  // lexicographic in (t, s)
    std::vector<SkippedPair> skipped;
    // First s whose transfer matrix could not be inverted; NaN when none.
    double first_singular_s = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Flat list of (i, j) index pairs with i > j, ordered by (t, s).
inline std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) pairs.emplace_back(i, j);
    return pairs;
}

struct PairOutcome {
    bool evaluated = false;
    SkipReason reason = SkipReason::SingularTransfer;
    std::array<double, 4> eigenvalues{};
};

}  // namespace detail

// Decides CP-divisibility of the map family over every grid pair t > s:
// builds the two transfer matrices, forms the propagator Phi(t) Phi(s)^{-1},
// reshuffles it into a Choi matrix, and checks the spectrum.  Any eigenvalue
// below -tolerance anywhere on the grid makes the verdict NonMarkovian.
// Pairs where Phi(s) cannot be inverted (or the resulting Choi matrix is
// numerically destroyed) are recorded and skipped; if any were skipped and no
// violation was found, the verdict is NotInvertible rather than Markovian,
// since those pairs were never certified.
inline DivisibilityReport check_cp_divisibility(const ChannelSpec& spec, const TimeGrid& grid,
                                                double tolerance = kVerdictTolerance,
                                                unsigned threads = 1) {
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        throw std::invalid_argument("check_cp_divisibility: tolerance must be positive");

    const std::vector<double> times = grid.values();
    const std::size_t n = times.size();

    // Transfer matrices and their inverses once per grid time, not per pair.
    std::vector<TransferMatrix> phi(n);
    std::vector<std::optional<ComplexMatrix>> phi_inv(n);
    parallel_for(n, threads, [&](std::size_t i) {
        phi[i] = transfer_from_map(build_map(spec, times[i]));
        phi_inv[i] = inverse(phi[i].matrix);
    });

    const auto pairs = detail::ordered_pairs(n);
    std::vector<detail::PairOutcome> outcomes(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        detail::PairOutcome& slot = outcomes[k];
        if (!phi_inv[j]) {
            slot.reason = SkipReason::SingularTransfer;
            return;
        }
        const TransferMatrix propagator{phi[i].matrix * (*phi_inv[j])};
        ChoiMatrix choi;
        try {
            choi = choi_from_transfer(propagator);
        } catch (const std::runtime_error&) {
            slot.reason = SkipReason::CorruptedChoi;
            return;
        }
        const std::vector<double> evs = hermitian_eigenvalues(choi.matrix);
        for (std::size_t e = 0; e < 4; ++e) slot.eigenvalues[e] = evs[e];
        slot.evaluated = true;
    });

    DivisibilityReport report;
    report.tolerance_used = tolerance;
    report.eigenvalue_trace.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        const detail::PairOutcome& slot = outcomes[k];
        if (!slot.evaluated) {
            report.skipped.push_back({times[i], times[j], slot.reason});
            if (std::isnan(report.first_singular_s)) report.first_singular_s = times[j];
            continue;
        }
        report.eigenvalue_trace.push_back({times[i], times[j], slot.eigenvalues});
        if (slot.eigenvalues[0] < report.min_eigenvalue) {
            report.min_eigenvalue = slot.eigenvalues[0];
            report.argmin_t = times[i];
            report.argmin_s = times[j];
        }
    }

    if (report.min_eigenvalue < -tolerance)
        report.verdict = Verdict::NonMarkovian;
    else if (!report.skipped.empty())
        report.verdict = Verdict::NotInvertible;
    else
        report.verdict = Verdict::Markovian;
    return report;
}

// Full eigenvalue trace for plotting; same data check_cp_divisibility sees.
inline std::vector<EigenvalueRow> eigenvalue_surface(const ChannelSpec& spec, const TimeGrid& grid,
                                                     double tolerance = kVerdictTolerance,
                                                     unsigned threads = 1) {
    return check_cp_divisibility(spec, grid, tolerance, threads).eigenvalue_trace;
}

struct SemigroupReport {
    double max_defect = 0.0;
    bool is_semigroup = true;
    double argmax_t = 0.0;
    double argmax_s = 0.0;
};

// Measures the worst composition defect ||Phi(t+s) - Phi(t) Phi(s)||_F over
// all grid pairs with t + s <= t_max (both orders, including t = s).  Exact
// for the grid because every sum t + s lands on a multiple of the spacing.
inline SemigroupReport check_semigroup(const ChannelSpec& spec, const TimeGrid& grid,
                                       double tolerance = kVerdictTolerance,
                                       unsigned threads = 1) {
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        throw std::invalid_argument("check_semigroup: tolerance must be positive");

    const std::vector<double> times = grid.values();
    const std::size_t n = times.size();

    std::vector<TransferMatrix> phi(n);
    parallel_for(n, threads, [&](std::size_t i) {
        phi[i] = transfer_from_map(build_map(spec, times[i]));
    });

    // Index pairs (i, j) with i + j <= points, so t + s never leaves the grid.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j <= grid.points; ++j) pairs.emplace_back(i, j);

    std::vector<double> defects(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        defects[k] = frobenius_norm(phi[i + j].matrix - phi[i].matrix * phi[j].matrix);
    });

    SemigroupReport report;
    report.max_defect = -1.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (defects[k] > report.max_defect) {
            report.max_defect = defects[k];
            report.argmax_t = times[pairs[k].first];
            report.argmax_s = times[pairs[k].second];
        }
    }
    report.is_semigroup = report.max_defect <= tolerance;
    return report;
}

}  // namespace mscope
