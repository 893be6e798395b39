#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "markovscope/channel.hpp"
#include "markovscope/complex_matrix.hpp"
#include "markovscope/linalg.hpp"
#include "markovscope/transfer.hpp"
#include "oracles.hpp"

using mscope::Axis;
using mscope::ChoiMatrix;
using mscope::Complex;
using mscope::ComplexMatrix;
using mscope::RateSpec;
using mscope::TransferMatrix;
using mscope::WeightedKrausMap;

namespace {

constexpr double kPi = std::numbers::pi;

WeightedKrausMap identity_map() {
    WeightedKrausMap map;
    map.terms.push_back({1.0, ComplexMatrix::identity(2)});
    return map;
}

WeightedKrausMap two_term_map(double p, const ComplexMatrix& u) {
    WeightedKrausMap map;
    map.terms.push_back({p, ComplexMatrix::identity(2)});
    map.terms.push_back({1.0 - p, u});
    return map;
}

WeightedKrausMap compose(const WeightedKrausMap& outer, const WeightedKrausMap& inner) {
    WeightedKrausMap map;
    for (const auto& a : outer.terms)
        for (const auto& b : inner.terms) map.terms.push_back({a.weight * b.weight, a.op * b.op});
    return map;
}

}  // namespace

TEST_CASE("matrix units and the entangled-state projector", "[transfer]") {
    const ComplexMatrix g01 = mscope::unit_matrix(0, 1);
    REQUIRE(g01(0, 1) == Complex{1.0, 0.0});
    REQUIRE(mscope::frobenius_norm(g01) == 1.0);
    REQUIRE_THROWS_AS(mscope::unit_matrix(2, 0), std::invalid_argument);

    const ComplexMatrix p = mscope::maximally_entangled_state();
    REQUIRE(p(0, 0) == Complex{0.5, 0.0});
    REQUIRE(p(0, 3) == Complex{0.5, 0.0});
    REQUIRE(p(3, 0) == Complex{0.5, 0.0});
    REQUIRE(p(3, 3) == Complex{0.5, 0.0});
    REQUIRE(p(1, 1) == Complex{0.0, 0.0});
    REQUIRE(std::abs(trace(p) - Complex{1.0, 0.0}) < 1e-15);
    // unit-trace rank-1 projector: p^2 = p
    REQUIRE(mscope::frobenius_norm(p * p - p) < 1e-15);
}

TEST_CASE("transfer matrix of known maps", "[transfer]") {
    SECTION("identity map has the identity transfer matrix") {
        const TransferMatrix phi = mscope::transfer_from_map(identity_map());
        REQUIRE(mscope::frobenius_norm(phi.matrix - ComplexMatrix::identity(4)) < 1e-15);
    }

    SECTION("ideal z dephasing is diagonal: diag(1, q, q, 1)") {
        // gamma = 1, t = 2, decay factor q = exp(-2)
        const double q = 0.1353352832366127;
        const auto map = mscope::single_dephasing_map(Axis::Z, RateSpec::constant(1.0), kPi, 2.0);
        const TransferMatrix phi = mscope::transfer_from_map(map);
        ComplexMatrix expected(4, 4);
        expected(0, 0) = 1.0;
        expected(1, 1) = q;
        expected(2, 2) = q;
        expected(3, 3) = 1.0;
        REQUIRE(mscope::frobenius_norm(phi.matrix - expected) < 1e-13);
    }

    SECTION("composition of maps is multiplication of transfer matrices") {
        std::mt19937_64 rng(31);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const WeightedKrausMap m1 = oracle::random_kraus_map(rng, 2 + trial % 3);
            const WeightedKrausMap m2 = oracle::random_kraus_map(rng, 2 + (trial + 1) % 3);
            const ComplexMatrix lhs = mscope::transfer_from_map(compose(m2, m1)).matrix;
            const ComplexMatrix rhs =
                mscope::transfer_from_map(m2).matrix * mscope::transfer_from_map(m1).matrix;
            worst = std::max(worst, mscope::frobenius_norm(lhs - rhs));
        }
        REQUIRE(worst < 1e-11);
    }
}

TEST_CASE("the two Choi constructions agree on random maps", "[transfer]") {
    std::mt19937_64 rng(32);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const WeightedKrausMap map = oracle::random_kraus_map(rng, 1 + trial % 4);
        const ChoiMatrix via_transfer =
            mscope::choi_from_transfer(mscope::transfer_from_map(map));
        const ChoiMatrix direct = mscope::choi_from_kraus_direct(map);
        worst = std::max(worst, mscope::frobenius_norm(via_transfer.matrix - direct.matrix));
    }
    REQUIRE(worst < 1e-11);
}

TEST_CASE("Choi matrices of physical maps are unit-trace PSD", "[transfer]") {
    SECTION("identity map reshuffles to the entangled-state projector") {
        const ChoiMatrix w = mscope::choi_from_transfer(mscope::transfer_from_map(identity_map()));
        REQUIRE(mscope::frobenius_norm(w.matrix - mscope::maximally_entangled_state()) < 1e-15);
    }

    SECTION("random mixtures of unitaries") {
        std::mt19937_64 rng(33);
        for (int trial = 0; trial < 200; ++trial) {
            const WeightedKrausMap map = oracle::random_kraus_map(rng, 1 + trial % 4);
            const ChoiMatrix w = mscope::choi_from_kraus_direct(map);
            REQUIRE(std::abs(trace(w.matrix) - Complex{1.0, 0.0}) < 1e-12);
            REQUIRE(mscope::hermiticity_defect(w.matrix) < 1e-14);
            REQUIRE(mscope::hermitian_eigenvalues(w.matrix).front() >= -1e-12);
        }
    }

    SECTION("partial trace over the output factor is identity/2 for TP maps") {
        std::mt19937_64 rng(34);
        const ComplexMatrix half_identity = Complex{0.5, 0.0} * ComplexMatrix::identity(2);
        for (int trial = 0; trial < 100; ++trial) {
            const WeightedKrausMap map = oracle::random_kraus_map(rng, 1 + trial % 3);
            const ChoiMatrix w = mscope::choi_from_kraus_direct(map);
            REQUIRE(mscope::frobenius_norm(mscope::partial_trace_second(w.matrix) -
                                           half_identity) < 1e-12);
            // the other marginal is the image of identity/2
            const ComplexMatrix image =
                Complex{0.5, 0.0} * mscope::apply_map_linear(map, ComplexMatrix::identity(2));
            REQUIRE(mscope::frobenius_norm(mscope::partial_trace_first(w.matrix) - image) <
                    1e-12);
        }
    }
}

TEST_CASE("Choi spectra of dephasing mixtures", "[transfer]") {
    SECTION("exact Pauli mixture: eigenvalues are the mixing weights") {
        // the two pure Choi components are orthogonal because sigma_x is traceless
        const double p = 0.7;
        const ChoiMatrix w = mscope::choi_from_kraus_direct(two_term_map(p, mscope::pauli(Axis::X)));
        const auto evs = mscope::hermitian_eigenvalues(w.matrix);
        REQUIRE(evs[0] == Catch::Approx(0.0).margin(1e-13));
        REQUIRE(evs[1] == Catch::Approx(0.0).margin(1e-13));
        REQUIRE(evs[2] == Catch::Approx(0.3).margin(1e-13));
        REQUIRE(evs[3] == Catch::Approx(0.7).margin(1e-13));
    }

    SECTION("imperfect gate mixture: rank two with overlap-shifted eigenvalues") {
        // For rho -> p rho + (1-p) U rho U^dag with U = exp(i a G_x), the two
        // pure Choi components overlap by |tr U| / 2 = |cos a|, which gives
        // eigenvalues (1 +- sqrt(cos^2 a + q^2 sin^2 a)) / 2, q = 2p - 1.
        for (const double alpha : {0.3, 1.0, kPi / 2 + 0.1, 2.9}) {
            for (const double p : {0.55, 0.75, 0.95}) {
                const double q = 2.0 * p - 1.0;
                const double mod = std::sqrt(std::cos(alpha) * std::cos(alpha) +
                                             q * q * std::sin(alpha) * std::sin(alpha));
                const ChoiMatrix w = mscope::choi_from_kraus_direct(
                    two_term_map(p, mscope::perturbed_pauli(Axis::X, alpha)));
                const auto evs = mscope::hermitian_eigenvalues(w.matrix);
                REQUIRE(evs[0] == Catch::Approx(0.0).margin(1e-12));
                REQUIRE(evs[1] == Catch::Approx(0.0).margin(1e-12));
                REQUIRE(evs[2] == Catch::Approx(0.5 * (1.0 - mod)).margin(1e-12));
                REQUIRE(evs[3] == Catch::Approx(0.5 * (1.0 + mod)).margin(1e-12));
            }
        }
    }
}

TEST_CASE("propagator transfer matrices", "[transfer]") {
    const auto phi_at = [](double t) {
        return mscope::transfer_from_map(
            mscope::single_dephasing_map(Axis::Z, RateSpec::constant(1.0), kPi, t));
    };

    SECTION("t = s gives the identity propagator") {
        const auto prop = mscope::propagator_transfer(phi_at(1.3), phi_at(1.3));
        REQUIRE(prop.has_value());
        REQUIRE(mscope::frobenius_norm(prop->matrix - ComplexMatrix::identity(4)) < 1e-12);
        // its Choi matrix is the entangled-state projector: eigenvalues (0,0,0,1)
        const auto evs =
            mscope::hermitian_eigenvalues(mscope::choi_from_transfer(*prop).matrix);
        REQUIRE(evs[0] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(evs[2] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(evs[3] == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("s = 0 recovers the map itself") {
        const auto prop = mscope::propagator_transfer(phi_at(2.0), phi_at(0.0));
        REQUIRE(prop.has_value());
        REQUIRE(mscope::frobenius_norm(prop->matrix - phi_at(2.0).matrix) < 1e-13);
    }

    SECTION("ideal dephasing propagator is dephasing with the time difference") {
        const double t = 2.5;
        const double s = 1.0;
        const auto prop = mscope::propagator_transfer(phi_at(t), phi_at(s));
        REQUIRE(prop.has_value());
        const auto evs =
            mscope::hermitian_eigenvalues(mscope::choi_from_transfer(*prop).matrix);
        const double shrink = std::exp(-(t - s));
        REQUIRE(evs[0] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(evs[1] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(evs[2] == Catch::Approx(0.5 * (1.0 - shrink)).margin(1e-12));
        REQUIRE(evs[3] == Catch::Approx(0.5 * (1.0 + shrink)).margin(1e-12));
    }

    SECTION("a fully dephased channel cannot be inverted") {
        WeightedKrausMap half_half;
        half_half.terms.push_back({0.5, ComplexMatrix::identity(2)});
        half_half.terms.push_back({0.5, mscope::pauli(Axis::Z)});
        const TransferMatrix singular = mscope::transfer_from_map(half_half);
        REQUIRE_FALSE(mscope::propagator_transfer(phi_at(1.0), singular).has_value());
    }
}

TEST_CASE("reshuffling rejects corrupted transfer matrices", "[transfer]") {
    // a lone off-diagonal transfer entry reshuffles to a non-Hermitian Choi
    ComplexMatrix junk(4, 4);
    junk(1, 0) = 1.0;
    REQUIRE_THROWS_AS(mscope::choi_from_transfer(TransferMatrix{junk}), std::runtime_error);

    REQUIRE_THROWS_AS(mscope::choi_from_transfer(TransferMatrix{ComplexMatrix(2, 2)}),
                      std::invalid_argument);
}
