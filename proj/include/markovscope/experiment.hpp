#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "markovscope/config.hpp"
#include "markovscope/divisibility.hpp"
#include "markovscope/fidelity.hpp"
#include "markovscope/parallel.hpp"

namespace mscope {

// Lossless text form of a double (17 significant digits round-trip exactly).
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Outcome of one campaign draw: the sampled parameters and the verdict of
// the divisibility sweep they produced.
struct CampaignRow {
    std::size_t rate_index = 0;
    std::size_t draw_index = 0;
    std::array<double, 3> gammas{};
    std::array<double, 3> angles{};
    double min_eigenvalue = 0.0;
    Verdict verdict = Verdict::Markovian;
};

struct CampaignSummary {
    std::size_t n_rate_choices = 0;
    std::size_t n_noise_draws = 0;
    std::size_t n_time_pairs = 0;
    std::size_t n_markovian = 0;
    std::size_t n_non_markovian = 0;
    std::size_t n_not_invertible = 0;
    std::size_t n_degenerate_draws = 0;  // draws where some sampled rate is 0
    double worst_min_eigenvalue = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    bool operator==(const CampaignSummary&) const = default;
};

struct CampaignResult {
    CampaignSummary summary;
    std::vector<CampaignRow> rows;  // ordered by (rate_index, draw_index)
};

namespace detail {

// All randomness flows through one sequential generator so results depend
// only on the seed, never on scheduling.
class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), using the top 53 bits of the generator output.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (lo, hi]: flipping the half-open interval keeps 0 out of
    // the draw when lo = 0, so every sampled channel is genuinely active.
    double rate(double lo, double hi) { return hi - (hi - lo) * uniform01(); }

    // Uniform on [0, 2 pi).
    double angle() { return 2.0 * std::numbers::pi * uniform01(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace detail

// Runs the robustness protocol: n_rates rate choices, each probed with
// n_draws independently sampled noise angles, each combination swept over the
// full (t, s) grid.  With a single-channel template one rate and one angle
// are drawn per sample; with a three-channel template, three of each.
// Deterministic for a fixed config (including seed) and any thread count.
inline CampaignResult run_campaign_detailed(const ExperimentConfig& config, std::size_t n_rates,
                                            std::size_t n_draws, unsigned threads = 1) {
    if (n_rates == 0 || n_draws == 0)
        throw std::invalid_argument("run_campaign: need at least one rate and one draw");

    const TimeGrid grid = resolved_grid(config);
    const CampaignParams& params = config.campaign;
    const bool single = config.channel.single_channel_axis.has_value();
    const std::size_t axis_index =
        single ? static_cast<std::size_t>(*config.channel.single_channel_axis) : 0;

    // Sample everything up front, in a fixed order.
    detail::SeededSampler sampler(config.seed);
    std::vector<std::array<double, 3>> rate_draws(n_rates);
    for (std::size_t r = 0; r < n_rates; ++r) {
        if (single) {
            rate_draws[r][axis_index] = sampler.rate(params.rate_min, params.rate_max);
        } else {
            for (std::size_t a = 0; a < 3; ++a)
                rate_draws[r][a] = sampler.rate(params.rate_min, params.rate_max);
        }
    }
    const std::size_t total = n_rates * n_draws;
    std::vector<std::array<double, 3>> angle_draws(total);
    for (std::size_t k = 0; k < total; ++k) {
        angle_draws[k] = {config.channel.noise.alpha, config.channel.noise.beta,
                          config.channel.noise.omega};
        if (single) {
            angle_draws[k][axis_index] = sampler.angle();
        } else {
            for (std::size_t a = 0; a < 3; ++a) angle_draws[k][a] = sampler.angle();
        }
    }

    CampaignResult result;
    result.rows.resize(total);
    parallel_for(total, threads, [&](std::size_t k) {
        const std::size_t r = k / n_draws;
        const std::size_t d = k % n_draws;

        ChannelSpec spec = config.channel;
        for (std::size_t a = 0; a < 3; ++a) {
            if (!single || a == axis_index)
                spec.rates[a] = RateSpec::constant(rate_draws[r][a]);
        }
        spec.noise.alpha = angle_draws[k][0];
        spec.noise.beta = angle_draws[k][1];
        spec.noise.omega = angle_draws[k][2];

        const DivisibilityReport report = check_cp_divisibility(spec, grid, config.tolerance, 1);
        result.rows[k] = {r, d, rate_draws[r], angle_draws[k], report.min_eigenvalue,
                          report.verdict};
    });

    CampaignSummary& s = result.summary;
    s.n_rate_choices = n_rates;
    s.n_noise_draws = n_draws;
    s.n_time_pairs = (grid.points + 1) * grid.points / 2;
    s.seed = config.seed;
    for (const CampaignRow& row : result.rows) {
        switch (row.verdict) {
            case Verdict::Markovian: ++s.n_markovian; break;
            case Verdict::NonMarkovian: ++s.n_non_markovian; break;
            case Verdict::NotInvertible: ++s.n_not_invertible; break;
        }
        bool degenerate = false;
        for (std::size_t a = 0; a < 3; ++a) {
            const bool sampled = !single || a == axis_index;
            if (sampled && row.gammas[a] == 0.0) degenerate = true;
        }
        if (degenerate) ++s.n_degenerate_draws;
        if (row.min_eigenvalue < s.worst_min_eigenvalue)
            s.worst_min_eigenvalue = row.min_eigenvalue;
    }
    return result;
}

inline CampaignSummary run_campaign(const ExperimentConfig& config, std::size_t n_rates,
                                    std::size_t n_draws, unsigned threads = 1) {
    return run_campaign_detailed(config, n_rates, n_draws, threads).summary;
}

namespace detail {

inline const char* skip_reason_name(SkipReason reason) {
    switch (reason) {
        case SkipReason::SingularTransfer: return "singular-transfer";
        case SkipReason::CorruptedChoi: return "corrupted-choi";
    }
    return "unknown";
}

inline std::string divisibility_csv(const ExperimentConfig& config,
                                    const DivisibilityReport& report) {
    std::ostringstream out;
    out << "# markov-scope " << experiment_name(config.experiment) << " seed="
        << config.seed << "\n";
    out << "t,s,lambda1,lambda2,lambda3,lambda4\n";
    for (const EigenvalueRow& row : report.eigenvalue_trace) {
        out << format_double(row.t) << ',' << format_double(row.s);
        for (const double ev : row.eigenvalues) out << ',' << format_double(ev);
        out << '\n';
    }
    for (const SkippedPair& skip : report.skipped)
        out << "# skipped t=" << format_double(skip.t) << " s=" << format_double(skip.s)
            << " reason=" << skip_reason_name(skip.reason) << "\n";
    out << "# verdict=" << verdict_name(report.verdict)
        << " min_eigenvalue=" << format_double(report.min_eigenvalue)
        << " argmin_t=" << format_double(report.argmin_t)
        << " argmin_s=" << format_double(report.argmin_s)
        << " tolerance=" << format_double(report.tolerance_used) << "\n";
    return out.str();
}

inline nlohmann::ordered_json divisibility_json(const ExperimentConfig& config,
                                                const DivisibilityReport& report) {
    nlohmann::ordered_json root;
    root["experiment"] = experiment_name(config.experiment);
    root["seed"] = config.seed;
    root["columns"] = {"t", "s", "lambda1", "lambda2", "lambda3", "lambda4"};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const EigenvalueRow& row : report.eigenvalue_trace)
        rows.push_back({row.t, row.s, row.eigenvalues[0], row.eigenvalues[1], row.eigenvalues[2],
                        row.eigenvalues[3]});
    root["rows"] = std::move(rows);
    nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
    for (const SkippedPair& skip : report.skipped)
        skipped.push_back(
            {{"t", skip.t}, {"s", skip.s}, {"reason", skip_reason_name(skip.reason)}});
    root["skipped"] = std::move(skipped);
    root["summary"] = {{"verdict", verdict_name(report.verdict)},
                       {"min_eigenvalue", report.min_eigenvalue},
                       {"argmin_t", report.argmin_t},
                       {"argmin_s", report.argmin_s},
                       {"tolerance", report.tolerance_used}};
    return root;
}

inline std::string semigroup_csv(const ExperimentConfig& config, const SemigroupReport& report) {
    std::ostringstream out;
    out << "# markov-scope " << experiment_name(config.experiment) << " seed="
        << config.seed << "\n";
    out << "max_defect,is_semigroup,argmax_t,argmax_s,tolerance\n";
    out << format_double(report.max_defect) << ',' << (report.is_semigroup ? "true" : "false")
        << ',' << format_double(report.argmax_t) << ',' << format_double(report.argmax_s) << ','
        << format_double(config.tolerance) << '\n';
    return out.str();
}

inline nlohmann::ordered_json semigroup_json(const ExperimentConfig& config,
                                             const SemigroupReport& report) {
    nlohmann::ordered_json root;
    root["experiment"] = experiment_name(config.experiment);
    root["seed"] = config.seed;
    root["summary"] = {{"max_defect", report.max_defect},
                       {"is_semigroup", report.is_semigroup},
                       {"argmax_t", report.argmax_t},
                       {"argmax_s", report.argmax_s},
                       {"tolerance", config.tolerance}};
    return root;
}

inline std::string fidelity_csv(const ExperimentConfig& config,
                                const std::vector<FidelityScanRow>& rows) {
    std::ostringstream out;
    out << "# markov-scope " << experiment_name(config.experiment) << " seed="
        << config.seed << "\n";
    out << "p_or_t,alpha,f_ideal_vs_noisy,f_identity_vs_noisy\n";
    for (const FidelityScanRow& row : rows)
        out << format_double(row.p_or_t) << ',' << format_double(row.alpha) << ','
            << format_double(row.f_ideal_vs_noisy) << ',' << format_double(row.f_identity_vs_noisy)
            << '\n';
    return out.str();
}

inline nlohmann::ordered_json fidelity_json(const ExperimentConfig& config,
                                            const std::vector<FidelityScanRow>& rows) {
    nlohmann::ordered_json root;
    root["experiment"] = experiment_name(config.experiment);
    root["seed"] = config.seed;
    root["columns"] = {"p_or_t", "alpha", "f_ideal_vs_noisy", "f_identity_vs_noisy"};
    nlohmann::ordered_json out_rows = nlohmann::ordered_json::array();
    for (const FidelityScanRow& row : rows)
        out_rows.push_back({row.p_or_t, row.alpha, row.f_ideal_vs_noisy, row.f_identity_vs_noisy});
    root["rows"] = std::move(out_rows);
    return root;
}

inline std::string campaign_csv(const ExperimentConfig& config, const CampaignResult& result) {
    std::ostringstream out;
    out << "# markov-scope " << experiment_name(config.experiment) << " seed="
        << config.seed << "\n";
    out << "rate_index,draw_index,gamma_x,gamma_y,gamma_z,alpha,beta,omega,min_eigenvalue,verdict\n";
    for (const CampaignRow& row : result.rows) {
        out << row.rate_index << ',' << row.draw_index;
        for (const double g : row.gammas) out << ',' << format_double(g);
        for (const double a : row.angles) out << ',' << format_double(a);
        out << ',' << format_double(row.min_eigenvalue) << ',' << verdict_name(row.verdict)
            << '\n';
    }
    const CampaignSummary& s = result.summary;
    out << "# n_rate_choices=" << s.n_rate_choices << " n_noise_draws=" << s.n_noise_draws
        << " n_time_pairs=" << s.n_time_pairs << " n_markovian=" << s.n_markovian
        << " n_non_markovian=" << s.n_non_markovian << " n_not_invertible=" << s.n_not_invertible
        << " n_degenerate_draws=" << s.n_degenerate_draws
        << " worst_min_eigenvalue=" << format_double(s.worst_min_eigenvalue) << " seed=" << s.seed
        << "\n";
    return out.str();
}

inline nlohmann::ordered_json campaign_json(const ExperimentConfig& config,
                                            const CampaignResult& result) {
    nlohmann::ordered_json root;
    root["experiment"] = experiment_name(config.experiment);
    root["seed"] = config.seed;
    root["columns"] = {"rate_index", "draw_index", "gamma_x", "gamma_y", "gamma_z",
                       "alpha",      "beta",       "omega",   "min_eigenvalue", "verdict"};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const CampaignRow& row : result.rows)
        rows.push_back({row.rate_index, row.draw_index, row.gammas[0], row.gammas[1],
                        row.gammas[2], row.angles[0], row.angles[1], row.angles[2],
                        row.min_eigenvalue, verdict_name(row.verdict)});
    root["rows"] = std::move(rows);
    const CampaignSummary& s = result.summary;
    root["summary"] = {{"n_rate_choices", s.n_rate_choices},
                       {"n_noise_draws", s.n_noise_draws},
                       {"n_time_pairs", s.n_time_pairs},
                       {"n_markovian", s.n_markovian},
                       {"n_non_markovian", s.n_non_markovian},
                       {"n_not_invertible", s.n_not_invertible},
                       {"n_degenerate_draws", s.n_degenerate_draws},
                       {"worst_min_eigenvalue", s.worst_min_eigenvalue},
                       {"seed", s.seed}};
    return root;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file \"" + path + "\"");
    out << text;
    if (!out)
        throw std::runtime_error("failed while writing \"" + path + "\"");
}

}  // namespace detail

// Runs the configured experiment, writes its output file, and returns the
// process exit code: 0 for success, 2 when a divisibility verdict (or any
// campaign draw) is NonMarkovian.  Errors surface as exceptions.
inline int run_experiment(const ExperimentConfig& config) {
    if (config.output_path.empty())
        throw std::invalid_argument("run_experiment: output_path is required");
    const unsigned threads = thread_count_from_env();
    const bool json = config.output_format == OutputFormat::Json;

    switch (config.experiment) {
        case ExperimentKind::DivisibilityScan: {
            const DivisibilityReport report =
                check_cp_divisibility(config.channel, resolved_grid(config), config.tolerance,
                                      threads);
            detail::write_text(config.output_path,
                               json ? detail::divisibility_json(config, report).dump(2) + "\n"
                                    : detail::divisibility_csv(config, report));
            return report.verdict == Verdict::NonMarkovian ? 2 : 0;
        }
        case ExperimentKind::SemigroupCheck: {
            const SemigroupReport report =
                check_semigroup(config.channel, resolved_grid(config), config.tolerance, threads);
            detail::write_text(config.output_path,
                               json ? detail::semigroup_json(config, report).dump(2) + "\n"
                                    : detail::semigroup_csv(config, report));
            return 0;
        }
        case ExperimentKind::FidelityPAlpha: {
            const std::vector<FidelityScanRow> rows = fidelity_scan_p_alpha(
                config.fidelity.p_points, config.fidelity.alpha_points, threads);
            detail::write_text(config.output_path,
                               json ? detail::fidelity_json(config, rows).dump(2) + "\n"
                                    : detail::fidelity_csv(config, rows));
            return 0;
        }
        case ExperimentKind::FidelityVsTime: {
            const std::vector<FidelityScanRow> rows = fidelity_vs_time(
                config.fidelity.gamma, config.fidelity.resolved_alphas(),
                config.fidelity.t_points, config.fidelity.t_max, threads);
            detail::write_text(config.output_path,
                               json ? detail::fidelity_json(config, rows).dump(2) + "\n"
                                    : detail::fidelity_csv(config, rows));
            return 0;
        }
        case ExperimentKind::RobustnessCampaign: {
            const CampaignResult result = run_campaign_detailed(
                config, config.campaign.n_rates, config.campaign.n_draws, threads);
            detail::write_text(config.output_path,
                               json ? detail::campaign_json(config, result).dump(2) + "\n"
                                    : detail::campaign_csv(config, result));
            return result.summary.n_non_markovian > 0 ? 2 : 0;
        }
    }
    throw std::invalid_argument("run_experiment: unknown experiment kind");
}

}  // namespace mscope
