#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "markovscope/channel.hpp"
#include "markovscope/divisibility.hpp"

namespace mscope {

enum class ExperimentKind {
    DivisibilityScan,
    SemigroupCheck,
    FidelityPAlpha,
    FidelityVsTime,
    RobustnessCampaign,
};

inline const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::DivisibilityScan: return "divisibility-scan";
        case ExperimentKind::SemigroupCheck: return "semigroup-check";
        case ExperimentKind::FidelityPAlpha: return "fidelity-p-alpha";
        case ExperimentKind::FidelityVsTime: return "fidelity-vs-time";
        case ExperimentKind::RobustnessCampaign: return "robustness-campaign";
    }
    throw std::invalid_argument("experiment_name: unknown kind");
}

enum class OutputFormat { Csv, Json };

// Knobs for the robustness campaign: how many rate choices, how many noise
// draws per rate, and the half-open-from-below range (rate_min, rate_max]
// the rates are drawn from.
struct CampaignParams {
    std::size_t n_rates = 10;
    std::size_t n_draws = 50;
    double rate_min = 0.0;
    double rate_max = 5.0;
};

// Knobs for the two fidelity scans.
struct FidelityParams {
    std::size_t p_points = 101;
    std::size_t alpha_points = 241;
    std::size_t t_points = 500;
    double t_max = 5.0;
    double gamma = 1.0;
    std::vector<double> alphas;  // empty means k pi/12, k = 0..6

    std::vector<double> resolved_alphas() const {
        if (!alphas.empty()) return alphas;
        std::vector<double> out;
        for (int k = 0; k <= 6; ++k) out.push_back(k * std::numbers::pi / 12.0);
        return out;
    }
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::DivisibilityScan;
    ChannelSpec channel{};
    std::optional<TimeGrid> grid{};  // absent: default_time_grid(channel)
    double tolerance = kVerdictTolerance;
    std::uint64_t seed = 0;
    std::string output_path;
    OutputFormat output_format = OutputFormat::Csv;
    CampaignParams campaign{};
    FidelityParams fidelity{};
};

// Default sweep window: slowly decaying channels (every rate constant and at
// most 1) warrant a longer horizon; everything else has effectively died off
// by t = 5.
inline TimeGrid default_time_grid(const ChannelSpec& spec) {
    bool slow = true;
    for (const RateSpec& r : spec.rates)
        if (r.kind != RateSpec::Kind::Constant || r.value > 1.0) slow = false;
    return TimeGrid{slow ? 10.0 : 5.0, 200};
}

inline TimeGrid resolved_grid(const ExperimentConfig& config) {
    return config.grid ? *config.grid : default_time_grid(config.channel);
}

namespace detail {

using nlohmann::json;

inline void require_known_keys(const json& obj, const char* where,
                               std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known)
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

inline double finite_number(const json& value, const std::string& where) {
    if (!value.is_number())
        throw std::invalid_argument("config: " + where + " must be a number");
    const double x = value.get<double>();
    if (!std::isfinite(x))
        throw std::invalid_argument("config: " + where + " must be finite");
    return x;
}

inline std::size_t positive_integer(const json& value, const std::string& where) {
    if (!value.is_number_integer() || value.is_number_float())
        throw std::invalid_argument("config: " + where + " must be an integer");
    const long long x = value.get<long long>();
    if (x <= 0)
        throw std::invalid_argument("config: " + where + " must be positive");
    return static_cast<std::size_t>(x);
}

inline RateSpec parse_rate(const json& value, const std::string& where) {
    if (!value.is_object())
        throw std::invalid_argument("config: " + where + " must be an object");
    require_known_keys(value, where.c_str(), {"kind", "value"});
    if (!value.contains("kind") || !value["kind"].is_string())
        throw std::invalid_argument("config: " + where + ".kind must be a string");
    const std::string kind = value["kind"].get<std::string>();
    const double param = value.contains("value") ? finite_number(value["value"], where + ".value") : 0.0;
    if (kind == "constant") return RateSpec::constant(param);
    if (kind == "sin-sq") return RateSpec::sin_sq(param);
    if (kind == "exp-decay") return RateSpec::exp_decay(param);
    if (kind == "tanh") return RateSpec::tanh_ramp(param);
    throw std::invalid_argument("config: " + where + ".kind \"" + kind + "\" is not recognized");
}

inline Axis parse_axis(const json& value, const std::string& where) {
    if (!value.is_string())
        throw std::invalid_argument("config: " + where + " must be a string");
    const std::string name = value.get<std::string>();
    if (name == "x") return Axis::X;
    if (name == "y") return Axis::Y;
    if (name == "z") return Axis::Z;
    throw std::invalid_argument("config: " + where + " must be one of \"x\", \"y\", \"z\"");
}

inline ChannelSpec parse_channel(const json& value) {
    if (!value.is_object())
        throw std::invalid_argument("config: channel must be an object");
    require_known_keys(value, "channel",
                       {"rates", "angles", "single_channel_axis", "single_exponent_scale"});
    ChannelSpec spec;
    if (value.contains("rates")) {
        const json& rates = value["rates"];
        if (!rates.is_array() || rates.size() != 3)
            throw std::invalid_argument("config: channel.rates must be an array of 3 entries");
        for (std::size_t i = 0; i < 3; ++i)
            spec.rates[i] = parse_rate(rates[i], "channel.rates[" + std::to_string(i) + "]");
    }
    if (value.contains("angles")) {
        const json& angles = value["angles"];
        if (!angles.is_object())
            throw std::invalid_argument("config: channel.angles must be an object");
        require_known_keys(angles, "channel.angles", {"alpha", "beta", "omega"});
        if (angles.contains("alpha"))
            spec.noise.alpha = finite_number(angles["alpha"], "channel.angles.alpha");
        if (angles.contains("beta"))
            spec.noise.beta = finite_number(angles["beta"], "channel.angles.beta");
        if (angles.contains("omega"))
            spec.noise.omega = finite_number(angles["omega"], "channel.angles.omega");
    }
    if (value.contains("single_channel_axis"))
        spec.single_channel_axis = parse_axis(value["single_channel_axis"], "channel.single_channel_axis");
    if (value.contains("single_exponent_scale")) {
        spec.single_exponent_scale =
            finite_number(value["single_exponent_scale"], "channel.single_exponent_scale");
        if (spec.single_exponent_scale <= 0.0)
            throw std::invalid_argument("config: channel.single_exponent_scale must be positive");
    }
    return spec;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
    using detail::finite_number;
    using detail::positive_integer;
    using detail::require_known_keys;

    if (!root.is_object())
        throw std::invalid_argument("config: top level must be an object");
    require_known_keys(root, "config",
                       {"experiment", "channel", "grid", "tolerance", "seed", "output_path",
                        "output_format", "campaign", "fidelity"});

    ExperimentConfig config;
    if (!root.contains("experiment") || !root["experiment"].is_string())
        throw std::invalid_argument("config: experiment must be a string");
    const std::string kind = root["experiment"].get<std::string>();
    if (kind == "divisibility-scan")
        config.experiment = ExperimentKind::DivisibilityScan;
    else if (kind == "semigroup-check")
        config.experiment = ExperimentKind::SemigroupCheck;
    else if (kind == "fidelity-p-alpha")
        config.experiment = ExperimentKind::FidelityPAlpha;
    else if (kind == "fidelity-vs-time")
        config.experiment = ExperimentKind::FidelityVsTime;
    else if (kind == "robustness-campaign")
        config.experiment = ExperimentKind::RobustnessCampaign;
    else
        throw std::invalid_argument("config: experiment \"" + kind + "\" is not recognized");

    if (root.contains("channel")) config.channel = detail::parse_channel(root["channel"]);

    if (root.contains("grid")) {
        const nlohmann::json& grid = root["grid"];
        if (!grid.is_object())
            throw std::invalid_argument("config: grid must be an object");
        require_known_keys(grid, "grid", {"t_max", "points"});
        TimeGrid g = default_time_grid(config.channel);
        if (grid.contains("t_max")) g.t_max = finite_number(grid["t_max"], "grid.t_max");
        if (grid.contains("points")) g.points = positive_integer(grid["points"], "grid.points");
        if (g.t_max <= 0.0)
            throw std::invalid_argument("config: grid.t_max must be positive");
        config.grid = g;
    }

    if (root.contains("tolerance")) {
        config.tolerance = finite_number(root["tolerance"], "tolerance");
        if (config.tolerance <= 0.0)
            throw std::invalid_argument("config: tolerance must be positive");
    }

    if (root.contains("seed")) {
        const nlohmann::json& seed = root["seed"];
        if (!seed.is_number_unsigned())
            throw std::invalid_argument("config: seed must be a nonnegative integer");
        config.seed = seed.get<std::uint64_t>();
    }

    if (root.contains("output_path")) {
        if (!root["output_path"].is_string())
            throw std::invalid_argument("config: output_path must be a string");
        config.output_path = root["output_path"].get<std::string>();
    }

    if (root.contains("output_format")) {
        if (!root["output_format"].is_string())
            throw std::invalid_argument("config: output_format must be a string");
        const std::string fmt = root["output_format"].get<std::string>();
        if (fmt == "csv")
            config.output_format = OutputFormat::Csv;
        else if (fmt == "json")
            config.output_format = OutputFormat::Json;
        else
            throw std::invalid_argument("config: output_format must be \"csv\" or \"json\"");
    }

    if (root.contains("campaign")) {
        const nlohmann::json& c = root["campaign"];
        if (!c.is_object())
            throw std::invalid_argument("config: campaign must be an object");
        require_known_keys(c, "campaign", {"n_rates", "n_draws", "rate_min", "rate_max"});
        if (c.contains("n_rates")) config.campaign.n_rates = positive_integer(c["n_rates"], "campaign.n_rates");
        if (c.contains("n_draws")) config.campaign.n_draws = positive_integer(c["n_draws"], "campaign.n_draws");
        if (c.contains("rate_min"))
            config.campaign.rate_min = finite_number(c["rate_min"], "campaign.rate_min");
        if (c.contains("rate_max"))
            config.campaign.rate_max = finite_number(c["rate_max"], "campaign.rate_max");
        if (config.campaign.rate_min < 0.0 || config.campaign.rate_max <= config.campaign.rate_min)
            throw std::invalid_argument("config: campaign rate range must satisfy 0 <= rate_min < rate_max");
    }

    if (root.contains("fidelity")) {
        const nlohmann::json& f = root["fidelity"];
        if (!f.is_object())
            throw std::invalid_argument("config: fidelity must be an object");
        require_known_keys(f, "fidelity",
                           {"p_points", "alpha_points", "t_points", "t_max", "gamma", "alphas"});
        if (f.contains("p_points")) config.fidelity.p_points = positive_integer(f["p_points"], "fidelity.p_points");
        if (f.contains("alpha_points"))
            config.fidelity.alpha_points = positive_integer(f["alpha_points"], "fidelity.alpha_points");
        if (f.contains("t_points")) config.fidelity.t_points = positive_integer(f["t_points"], "fidelity.t_points");
        if (f.contains("t_max")) {
            config.fidelity.t_max = finite_number(f["t_max"], "fidelity.t_max");
            if (config.fidelity.t_max <= 0.0)
                throw std::invalid_argument("config: fidelity.t_max must be positive");
        }
        if (f.contains("gamma")) {
            config.fidelity.gamma = finite_number(f["gamma"], "fidelity.gamma");
            if (config.fidelity.gamma <= 0.0)
                throw std::invalid_argument("config: fidelity.gamma must be positive");
        }
        if (f.contains("alphas")) {
            if (!f["alphas"].is_array() || f["alphas"].empty())
                throw std::invalid_argument("config: fidelity.alphas must be a nonempty array");
            config.fidelity.alphas.clear();
            for (std::size_t i = 0; i < f["alphas"].size(); ++i)
                config.fidelity.alphas.push_back(
                    finite_number(f["alphas"][i], "fidelity.alphas[" + std::to_string(i) + "]"));
        }
    }

    return config;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open \"" + path + "\"");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw std::invalid_argument("config: JSON parse failure in \"" + path + "\": " + err.what());
    }
    return parse_config(root);
}

// Ready-made configurations matching the published sweeps: fig1a/b/c are the
// single imperfect-x-gate scans at rates 1/2/3, fig2 is the static
// p-vs-angle fidelity scan, fig3a..f the fidelity-vs-time scans at rates
// 1/2/3 (d/e/f carry the same rows as a/b/c; both fidelity columns are always
// emitted), fig4a/b the three-channel scans that lose CP-divisibility, and
// fig5a/b/c the single-channel scans with time-dependent rates.
inline ExperimentConfig preset_config(const std::string& name) {
    const double nudge = 0.1;
    const double half_pi = std::numbers::pi / 2;

    ExperimentConfig config;
    config.output_path = name + ".csv";

    auto noisy_single_x = [&](RateSpec rate) {
        NoiseAngles noise;
        noise.alpha = half_pi + nudge;
        config.experiment = ExperimentKind::DivisibilityScan;
        config.channel = ChannelSpec::single_dephasing(Axis::X, rate, noise);
    };

    if (name == "fig1a" || name == "fig1b" || name == "fig1c") {
        const double gamma = name == "fig1a" ? 1.0 : name == "fig1b" ? 2.0 : 3.0;
        noisy_single_x(RateSpec::constant(gamma));
        config.grid = TimeGrid{10.0, 100};
    } else if (name == "fig2") {
        config.experiment = ExperimentKind::FidelityPAlpha;
    } else if (name == "fig3a" || name == "fig3b" || name == "fig3c" || name == "fig3d" ||
               name == "fig3e" || name == "fig3f") {
        config.experiment = ExperimentKind::FidelityVsTime;
        const char suffix = name[4];
        config.fidelity.gamma = (suffix == 'a' || suffix == 'd') ? 1.0
                              : (suffix == 'b' || suffix == 'e') ? 2.0
                                                                 : 3.0;
    } else if (name == "fig4a" || name == "fig4b") {
        NoiseAngles noise;
        noise.alpha = half_pi + nudge;
        noise.beta = half_pi + nudge;
        noise.omega = 2 * half_pi + nudge;
        const double gamma_y = name == "fig4a" ? 0.5 : 0.0;
        config.experiment = ExperimentKind::DivisibilityScan;
        config.channel = ChannelSpec::three_channel(
            RateSpec::constant(1.0), RateSpec::constant(gamma_y), RateSpec::constant(1.5), noise);
        config.grid = TimeGrid{5.0, 100};
    } else if (name == "fig5a") {
        noisy_single_x(RateSpec::sin_sq(half_pi));
        config.grid = TimeGrid{5.0, 100};
    } else if (name == "fig5b") {
        noisy_single_x(RateSpec::exp_decay(1.0));
        config.grid = TimeGrid{5.0, 100};
    } else if (name == "fig5c") {
        noisy_single_x(RateSpec::tanh_ramp(1.0));
        config.grid = TimeGrid{5.0, 100};
    } else {
        throw std::invalid_argument("preset: \"" + name + "\" is not a known preset");
    }
    return config;
}

inline std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig1c", "fig2",  "fig3a", "fig3b", "fig3c", "fig3d",
            "fig3e", "fig3f", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c"};
}

}  // namespace mscope
