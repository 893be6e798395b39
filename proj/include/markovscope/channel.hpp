#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "markovscope/complex_matrix.hpp"
#include "markovscope/linalg.hpp"

namespace mscope {

enum class Axis { X, Y, Z };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

inline const char* axis_name(Axis axis) {
    switch (axis) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    throw std::invalid_argument("axis_name: unknown axis");
}

inline ComplexMatrix pauli(Axis axis) {
    const Complex i{0.0, 1.0};
    switch (axis) {
        case Axis::X: return {{0.0, 1.0}, {1.0, 0.0}};
        case Axis::Y: return {{0.0, -i}, {i, 0.0}};
        case Axis::Z: return {{1.0, 0.0}, {0.0, -1.0}};
    }
    throw std::invalid_argument("pauli: unknown axis");
}

// Hermitian generators whose unitary orbits pass through the Pauli matrices:
// exp(i pi/2 G_x) = sigma_x, exp(i pi/2 G_y) = sigma_y, exp(i pi G_z) = sigma_z
// (the last up to global phase).  Dialing the angle away from those values
// produces the imperfect gates studied here.
inline ComplexMatrix noise_generator(Axis axis) {
    const Complex i{0.0, 1.0};
    switch (axis) {
        case Axis::X: return {{1.0, -1.0}, {-1.0, 1.0}};
        case Axis::Y: return {{1.0, i}, {-i, 1.0}};
        case Axis::Z: return {{0.0, 0.0}, {0.0, 1.0}};
    }
    throw std::invalid_argument("noise_generator: unknown axis");
}

inline ComplexMatrix perturbed_pauli(Axis axis, double angle) {
    return exp_i_theta_hermitian(noise_generator(axis), angle);
}

// Rotation angles for the three imperfect gates.  Defaults are the values
// that reproduce the exact Pauli matrices.
struct NoiseAngles {
    double alpha = std::numbers::pi / 2;  // x gate
    double beta = std::numbers::pi / 2;   // y gate
    double omega = std::numbers::pi;      // z gate

    static NoiseAngles canonical() { return {}; }
};

inline double angle_for_axis(const NoiseAngles& noise, Axis axis) {
    switch (axis) {
        case Axis::X: return noise.alpha;
        case Axis::Y: return noise.beta;
        case Axis::Z: return noise.omega;
    }
    throw std::invalid_argument("angle_for_axis: unknown axis");
}

// One decay-rate profile gamma(t).  `value` is the constant rate for
// Constant, the frequency b in sin^2(b t), or the scale a in exp(-a t)
// and tanh(a t).
struct RateSpec {
    enum class Kind { Constant, SinSq, ExpDecay, Tanh };

    Kind kind = Kind::Constant;
    double value = 0.0;

    static RateSpec constant(double gamma) { return checked({Kind::Constant, gamma}); }
    static RateSpec sin_sq(double b) { return checked({Kind::SinSq, b}); }
    static RateSpec exp_decay(double a) { return checked({Kind::ExpDecay, a}); }
    static RateSpec tanh_ramp(double a) { return checked({Kind::Tanh, a}); }

private:
    static RateSpec checked(RateSpec r) {
        if (!std::isfinite(r.value) || r.value < 0.0)
            throw std::invalid_argument("RateSpec: parameter must be finite and nonnegative");
        return r;
    }
};

inline double rate_at(const RateSpec& rate, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("rate_at: time must be finite and nonnegative");
    switch (rate.kind) {
        case RateSpec::Kind::Constant: return rate.value;
        case RateSpec::Kind::SinSq: {
            const double s = std::sin(rate.value * t);
            return s * s;
        }
        case RateSpec::Kind::ExpDecay: return std::exp(-rate.value * t);
        case RateSpec::Kind::Tanh: return std::tanh(rate.value * t);
    }
    throw std::invalid_argument("rate_at: unknown rate kind");
}

// Integral of gamma over [0, t], in closed form per profile:
//   Constant: gamma t
//   SinSq:    t/2 - sin(2 b t) / (4 b)
//   ExpDecay: (1 - exp(-a t)) / a
//   Tanh:     ln(cosh(a t)) / a
// The a -> 0 (resp. b -> 0) limits are handled explicitly.
inline double integrated_rate(const RateSpec& rate, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("integrated_rate: time must be finite and nonnegative");
    const double a = rate.value;
    switch (rate.kind) {
        case RateSpec::Kind::Constant:
            return a * t;
        case RateSpec::Kind::SinSq:
            if (a == 0.0) return 0.0;
            return 0.5 * t - std::sin(2.0 * a * t) / (4.0 * a);
        case RateSpec::Kind::ExpDecay:
            if (a == 0.0) return t;  // gamma(t) = 1 identically
            return -std::expm1(-a * t) / a;
        case RateSpec::Kind::Tanh: {
            if (a == 0.0) return 0.0;
            // ln(cosh(x)) = x - ln 2 + ln(1 + e^{-2x}), safe against overflow
            const double x = a * t;
            return (x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x))) / a;
        }
    }
    throw std::invalid_argument("integrated_rate: unknown rate kind");
}

// Full description of one dynamical map family.  With single_channel_axis
// set, only that axis dephases and its weight decays like
// exp(-single_exponent_scale * Gamma(t)); the scale defaults to 1 and can be
// set to 2 to match the convention of the three-channel weights below.
struct ChannelSpec {
    std::array<RateSpec, 3> rates{};  // x, y, z in that order
    NoiseAngles noise{};
    std::optional<Axis> single_channel_axis{};
    double single_exponent_scale = 1.0;

    static ChannelSpec single_dephasing(Axis axis, RateSpec rate,
                                        NoiseAngles noise = NoiseAngles::canonical(),
                                        double exponent_scale = 1.0) {
        ChannelSpec spec;
        spec.rates[static_cast<std::size_t>(axis)] = rate;
        spec.noise = noise;
        spec.single_channel_axis = axis;
        spec.single_exponent_scale = exponent_scale;
        return spec;
    }

    static ChannelSpec three_channel(RateSpec gx, RateSpec gy, RateSpec gz,
                                     NoiseAngles noise = NoiseAngles::canonical()) {
        ChannelSpec spec;
        spec.rates = {gx, gy, gz};
        spec.noise = noise;
        return spec;
    }
};

// Mixture of unitaries: rho -> sum_k w_k U_k rho U_k^dagger.
struct KrausTerm {
    double weight = 0.0;
    ComplexMatrix op;
};

struct WeightedKrausMap {
    std::vector<KrausTerm> terms;
};

// Checks the mixture is physical: weights a probability distribution and
// every operator unitary, both within `tol`.
inline void validate_map(const WeightedKrausMap& map, double tol = 1e-12) {
    if (map.terms.empty())
        throw std::domain_error("validate_map: map has no terms");
    double total = 0.0;
    for (const auto& term : map.terms) {
        if (!std::isfinite(term.weight) || term.weight < -tol)
            throw std::domain_error("validate_map: weight is negative or not finite");
        total += term.weight;
        if (!term.op.is_square())
            throw std::domain_error("validate_map: operator is not square");
        const ComplexMatrix gram = dagger(term.op) * term.op;
        if (frobenius_norm(gram - ComplexMatrix::identity(term.op.rows())) > tol)
            throw std::domain_error("validate_map: operator is not unitary within tolerance");
    }
    if (std::abs(total - 1.0) > tol)
        throw std::domain_error("validate_map: weights do not sum to one within tolerance");
}

// Mixing weights of the three-channel map at time t:
//   p0 = (1 + E_x + E_y + E_z) / 4,   p_j = (1 + E_j - E_k - E_l) / 4
// with E_x = exp(-2 (Gamma_y + Gamma_z)) and cyclic.  Nonnegative for any
// nonnegative integrated rates; round-off is clamped at zero.
inline std::array<double, 4> multi_channel_probabilities(const std::array<RateSpec, 3>& rates,
                                                         double t) {
    const double g1 = integrated_rate(rates[0], t);
    const double g2 = integrated_rate(rates[1], t);
    const double g3 = integrated_rate(rates[2], t);
    const double ex = std::exp(-2.0 * (g2 + g3));
    const double ey = std::exp(-2.0 * (g1 + g3));
    const double ez = std::exp(-2.0 * (g1 + g2));
    std::array<double, 4> p{
        0.25 * (1.0 + ex + ey + ez),
        0.25 * (1.0 + ex - ey - ez),
        0.25 * (1.0 - ex + ey - ez),
        0.25 * (1.0 - ex - ey + ez),
    };
    for (double& w : p) {
        if (w < -1e-12)
            throw std::runtime_error("multi_channel_probabilities: weight fell below zero");
        w = std::max(w, 0.0);
    }
    return p;
}

// Dephasing along a single axis with an imperfect gate:
//   rho -> (1 + q)/2 rho + (1 - q)/2 U rho U^dagger,  q = exp(-scale Gamma(t)).
inline WeightedKrausMap single_dephasing_map(Axis axis, const RateSpec& rate, double noise_angle,
                                             double t, double exponent_scale = 1.0) {
    if (!std::isfinite(exponent_scale) || exponent_scale <= 0.0)
        throw std::invalid_argument("single_dephasing_map: exponent scale must be positive");
    const double q = std::exp(-exponent_scale * integrated_rate(rate, t));
    WeightedKrausMap map;
    map.terms.push_back({0.5 * (1.0 + q), ComplexMatrix::identity(2)});
    map.terms.push_back({0.5 * (1.0 - q), perturbed_pauli(axis, noise_angle)});
    return map;
}

// Three-channel map with one imperfect gate per axis.
inline WeightedKrausMap three_channel_map(const std::array<RateSpec, 3>& rates,
                                          const NoiseAngles& noise, double t) {
    const std::array<double, 4> p = multi_channel_probabilities(rates, t);
    WeightedKrausMap map;
    map.terms.push_back({p[0], ComplexMatrix::identity(2)});
    map.terms.push_back({p[1], perturbed_pauli(Axis::X, noise.alpha)});
    map.terms.push_back({p[2], perturbed_pauli(Axis::Y, noise.beta)});
    map.terms.push_back({p[3], perturbed_pauli(Axis::Z, noise.omega)});
    return map;
}

inline WeightedKrausMap build_map(const ChannelSpec& spec, double t) {
    if (spec.single_channel_axis) {
        const Axis axis = *spec.single_channel_axis;
        return single_dephasing_map(axis, spec.rates[static_cast<std::size_t>(axis)],
                                    angle_for_axis(spec.noise, axis), t,
                                    spec.single_exponent_scale);
    }
    return three_channel_map(spec.rates, spec.noise, t);
}

// Applies the map to arbitrary (not necessarily physical) input.  Used for
// transfer-matrix assembly where the basis elements are not states.
inline ComplexMatrix apply_map_linear(const WeightedKrausMap& map, const ComplexMatrix& x) {
    if (map.terms.empty())
        throw std::invalid_argument("apply_map_linear: map has no terms");
    ComplexMatrix out(x.rows(), x.cols());
    for (const auto& term : map.terms) {
        if (term.weight == 0.0) continue;
        out += Complex{term.weight, 0.0} * (term.op * x * dagger(term.op));
    }
    return out;
}

// Applies the map to a density matrix, checking the input is one.
inline ComplexMatrix apply_map(const WeightedKrausMap& map, const ComplexMatrix& rho) {
    if (!rho.is_square())
        throw std::invalid_argument("apply_map: state must be square");
    if (hermiticity_defect(rho) > 1e-10)
        throw std::domain_error("apply_map: state is not Hermitian within tolerance");
    if (std::abs(trace(rho) - Complex{1.0, 0.0}) > 1e-10)
        throw std::domain_error("apply_map: state does not have unit trace");
    return apply_map_linear(map, rho);
}

}  // namespace mscope
