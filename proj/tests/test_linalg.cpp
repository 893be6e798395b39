#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "markovscope/complex_matrix.hpp"
#include "markovscope/linalg.hpp"
#include "oracles.hpp"

using mscope::Complex;
using mscope::ComplexMatrix;

namespace {

double eigen_residual(const ComplexMatrix& m, const mscope::HermitianEigenSystem& es) {
    // max over columns of || m v_k - lambda_k v_k ||
    double worst = 0.0;
    const std::size_t n = m.rows();
    const ComplexMatrix mv = m * es.eigenvectors;
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += std::norm(mv(i, k) - es.eigenvalues[k] * es.eigenvectors(i, k));
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

}  // namespace

TEST_CASE("eigensystem of known matrices", "[linalg]") {
    SECTION("diagonal input is returned sorted") {
        const ComplexMatrix d{{3.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 2.0}};
        const auto es = mscope::hermitian_eigensystem(d);
        REQUIRE(es.eigenvalues.size() == 3);
        REQUIRE(es.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-14));
        REQUIRE(es.eigenvalues[1] == Catch::Approx(2.0).margin(1e-14));
        REQUIRE(es.eigenvalues[2] == Catch::Approx(3.0).margin(1e-14));
    }

    SECTION("rank-1 complex projector-like matrix") {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        const Complex i{0.0, 1.0};
        const ComplexMatrix g{{1.0, i}, {-i, 1.0}};
        const auto evs = mscope::hermitian_eigenvalues(g);
        REQUIRE(evs[0] == Catch::Approx(0.0).margin(1e-13));
        REQUIRE(evs[1] == Catch::Approx(2.0).margin(1e-13));
    }

    SECTION("non-Hermitian input is rejected") {
        const ComplexMatrix bad{{0.0, 1.0}, {2.0, 0.0}};
        REQUIRE_THROWS_AS(mscope::hermitian_eigensystem(bad), std::domain_error);
        REQUIRE_THROWS_AS(mscope::hermitian_eigensystem(ComplexMatrix(2, 3)),
                          std::invalid_argument);
    }

    SECTION("slightly non-Hermitian input inside the tolerance is symmetrized") {
        ComplexMatrix near{{1.0, 0.5}, {0.5 + 1e-10, 2.0}};
        const auto evs = mscope::hermitian_eigenvalues(near);
        REQUIRE(evs.size() == 2);
        REQUIRE(evs[0] + evs[1] == Catch::Approx(3.0).margin(1e-12));
    }
}

TEST_CASE("eigensystem agrees with the characteristic-polynomial oracle", "[linalg]") {
    std::mt19937_64 rng(101);
    double worst_gap = 0.0;
    double worst_residual = 0.0;
    double worst_trace = 0.0;
    double worst_unitarity = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + trial % 3;  // 2, 3, 4
        const ComplexMatrix m = oracle::random_hermitian(rng, n);
        const auto es = mscope::hermitian_eigensystem(m);

        REQUIRE(es.eigenvalues.size() == n);
        for (std::size_t k = 1; k < n; ++k) REQUIRE(es.eigenvalues[k - 1] <= es.eigenvalues[k]);

        const auto reference = oracle::hermitian_eigenvalues(m);
        for (std::size_t k = 0; k < n; ++k)
            worst_gap = std::max(worst_gap, std::abs(es.eigenvalues[k] - reference[k]));

        double sum = 0.0;
        for (const double ev : es.eigenvalues) sum += ev;
        worst_trace = std::max(worst_trace, std::abs(sum - trace(m).real()));

        worst_residual = std::max(worst_residual, eigen_residual(m, es));
        worst_unitarity = std::max(
            worst_unitarity, mscope::frobenius_norm(dagger(es.eigenvectors) * es.eigenvectors -
                                                    ComplexMatrix::identity(n)));
    }
    REQUIRE(worst_gap < 1e-9);        // Durand-Kerner limits the comparison, not Jacobi
    REQUIRE(worst_trace < 1e-10);
    REQUIRE(worst_residual < 1e-10);
    REQUIRE(worst_unitarity < 1e-11);
}

TEST_CASE("inverse round-trips and detects singularity", "[linalg]") {
    SECTION("known 2x2 inverse") {
        const ComplexMatrix m{{1.0, 2.0}, {3.0, 4.0}};
        const auto inv = mscope::inverse(m);
        REQUIRE(inv.has_value());
        const ComplexMatrix expected{{-2.0, 1.0}, {1.5, -0.5}};
        REQUIRE(mscope::frobenius_norm(*inv - expected) < 1e-14);
    }

    SECTION("random well-conditioned matrices round-trip") {
        std::mt19937_64 rng(202);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            // u diag(d) v with d in [0.5, 2]: condition number at most 4
            const ComplexMatrix u = oracle::random_unitary(rng, 4);
            const ComplexMatrix v = oracle::random_unitary(rng, 4);
            ComplexMatrix d(4, 4);
            for (std::size_t i = 0; i < 4; ++i) d(i, i) = 0.5 + 1.5 * oracle::uniform01(rng);
            const ComplexMatrix m = u * d * v;
            const auto inv = mscope::inverse(m);
            REQUIRE(inv.has_value());
            worst = std::max(worst, mscope::frobenius_norm(m * (*inv) -
                                                           ComplexMatrix::identity(4)));
        }
        REQUIRE(worst < 1e-10);
    }

    SECTION("exactly singular and threshold-singular inputs") {
        const ComplexMatrix rank1{{1.0, 2.0}, {2.0, 4.0}};
        REQUIRE_FALSE(mscope::inverse(rank1).has_value());

        ComplexMatrix nearly = ComplexMatrix::identity(2);
        nearly(1, 1) = 1e-13;  // below the default 1e-12 pivot threshold
        REQUIRE_FALSE(mscope::inverse(nearly).has_value());
        REQUIRE(mscope::inverse(nearly, 1e-14).has_value());

        REQUIRE_THROWS_AS(mscope::inverse(ComplexMatrix(2, 3)), std::invalid_argument);
    }
}

TEST_CASE("psd_sqrt squares back and rejects negative spectra", "[linalg]") {
    std::mt19937_64 rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const ComplexMatrix rho = oracle::random_psd_unit_trace(rng, 4);
        const ComplexMatrix root = mscope::psd_sqrt(rho);
        worst = std::max(worst, mscope::frobenius_norm(root * root - rho));
        REQUIRE(mscope::hermiticity_defect(root) < 1e-12);
    }
    REQUIRE(worst < 1e-11);

    // tiny negative eigenvalues are clamped, genuine ones rejected
    ComplexMatrix wobbly(2, 2);
    wobbly(0, 0) = -5e-11;
    wobbly(1, 1) = 1.0;
    const ComplexMatrix root = mscope::psd_sqrt(wobbly);
    REQUIRE(root(0, 0).real() == 0.0);

    ComplexMatrix negative(2, 2);
    negative(0, 0) = -1e-3;
    negative(1, 1) = 1.0;
    REQUIRE_THROWS_AS(mscope::psd_sqrt(negative), std::domain_error);
}

TEST_CASE("exp_i_theta_hermitian is unitary and matches the series oracle", "[linalg]") {
    std::mt19937_64 rng(404);
    const Complex i{0.0, 1.0};

    SECTION("theta = 0 gives the identity") {
        const ComplexMatrix g = oracle::random_hermitian(rng, 2);
        const ComplexMatrix u = mscope::exp_i_theta_hermitian(g, 0.0);
        REQUIRE(mscope::frobenius_norm(u - ComplexMatrix::identity(2)) < 1e-14);
    }

    SECTION("unitarity across a theta sweep") {
        const ComplexMatrix g = oracle::random_hermitian(rng, 2);
        for (int k = 0; k <= 100; ++k) {
            const double theta = -8.0 + 0.16 * k;
            const ComplexMatrix u = mscope::exp_i_theta_hermitian(g, theta);
            REQUIRE(mscope::frobenius_norm(dagger(u) * u - ComplexMatrix::identity(2)) < 1e-13);
        }
    }

    SECTION("agreement with scaling-and-squaring Taylor series") {
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + trial % 3;
            const ComplexMatrix g = oracle::random_hermitian(rng, n);
            const double theta = -4.0 + 8.0 * oracle::uniform01(rng);
            const ComplexMatrix via_spectrum = mscope::exp_i_theta_hermitian(g, theta);
            const ComplexMatrix via_series = oracle::matrix_exp((i * Complex{theta, 0.0}) * g);
            worst = std::max(worst, mscope::frobenius_norm(via_spectrum - via_series));
        }
        REQUIRE(worst < 1e-11);
    }

    SECTION("group property in theta") {
        const ComplexMatrix g = oracle::random_hermitian(rng, 3);
        const ComplexMatrix u1 = mscope::exp_i_theta_hermitian(g, 0.7);
        const ComplexMatrix u2 = mscope::exp_i_theta_hermitian(g, 1.9);
        const ComplexMatrix u12 = mscope::exp_i_theta_hermitian(g, 2.6);
        REQUIRE(mscope::frobenius_norm(u1 * u2 - u12) < 1e-12);
    }

    SECTION("non-finite theta is rejected") {
        const ComplexMatrix g = ComplexMatrix::identity(2);
        REQUIRE_THROWS_AS(
            mscope::exp_i_theta_hermitian(g, std::numeric_limits<double>::infinity()),
            std::invalid_argument);
    }
}
