// markov-scope: certify or refute Markovianity (CP-divisibility) of qubit
// random-unitary dephasing maps with imperfect gates, and measure how far
// the perturbed channels drift from the ideal ones.
//
// Exit codes: 0 success / Markovian, 2 NonMarkovian detected, 1 error.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "markovscope/markovscope.hpp"

namespace {

std::vector<double> parse_triple(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size())
            throw std::invalid_argument(what + ": could not parse \"" + item + "\"");
        out.push_back(value);
    }
    if (out.size() != 3)
        throw std::invalid_argument(what + ": expected three comma-separated values");
    return out;
}

int run_check(const std::string& rates_text, const std::string& angles_text, double t_max,
              std::size_t points, double tolerance) {
    const std::vector<double> rates = parse_triple(rates_text, "--rates");
    const std::vector<double> angles = parse_triple(angles_text, "--angles");

    mscope::NoiseAngles noise;
    noise.alpha = angles[0];
    noise.beta = angles[1];
    noise.omega = angles[2];
    const mscope::ChannelSpec spec = mscope::ChannelSpec::three_channel(
        mscope::RateSpec::constant(rates[0]), mscope::RateSpec::constant(rates[1]),
        mscope::RateSpec::constant(rates[2]), noise);

    const mscope::TimeGrid grid{t_max, points};
    const mscope::DivisibilityReport report = mscope::check_cp_divisibility(
        spec, grid, tolerance, mscope::thread_count_from_env());

    std::printf("verdict=%s min_eigenvalue=%s argmin_t=%s argmin_s=%s tolerance=%s\n",
                mscope::verdict_name(report.verdict),
                mscope::format_double(report.min_eigenvalue).c_str(),
                mscope::format_double(report.argmin_t).c_str(),
                mscope::format_double(report.argmin_s).c_str(),
                mscope::format_double(report.tolerance_used).c_str());
    for (const mscope::SkippedPair& skip : report.skipped)
        std::fprintf(stderr, "skipped t=%s s=%s\n", mscope::format_double(skip.t).c_str(),
                     mscope::format_double(skip.s).c_str());
    return report.verdict == mscope::Verdict::NonMarkovian ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markovianity and fidelity scans for noisy qubit dephasing channels"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("--config", config_path, "Path to the JSON experiment config")->required();

    std::string preset_name;
    std::string preset_out;
    std::string preset_format = "csv";
    CLI::App* preset = app.add_subcommand("preset", "Run a built-in figure-reproduction preset");
    preset->add_option("name", preset_name,
                       "Preset name (fig1a..fig1c, fig2, fig3a..fig3f, fig4a, fig4b, fig5a..fig5c)")
        ->required();
    preset->add_option("--out", preset_out, "Output path (default: <name>.<format>)");
    preset->add_option("--format", preset_format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string rates_text;
    std::string angles_text;
    double t_max = 5.0;
    std::size_t points = 200;
    double tolerance = mscope::kVerdictTolerance;
    CLI::App* check =
        app.add_subcommand("check", "One-shot divisibility check for constant-rate channels");
    check->add_option("--rates", rates_text, "Constant rates g1,g2,g3")->required();
    check->add_option("--angles", angles_text, "Gate angles a,b,w in radians")->required();
    check->add_option("--tmax", t_max, "Largest time on the grid");
    check->add_option("--points", points, "Grid subdivisions (grid carries points+1 samples)");
    check->add_option("--tol", tolerance, "Eigenvalue verdict tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        // Usage errors exit 1 to keep the 0/2/1 contract; --help stays 0.
        return app.exit(err) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return mscope::run_experiment(mscope::load_config(config_path));
        }
        if (preset->parsed()) {
            mscope::ExperimentConfig config = mscope::preset_config(preset_name);
            config.output_format = preset_format == "json" ? mscope::OutputFormat::Json
                                                           : mscope::OutputFormat::Csv;
            config.output_path =
                preset_out.empty() ? preset_name + "." + preset_format : preset_out;
            const int code = mscope::run_experiment(config);
            std::printf("wrote %s\n", config.output_path.c_str());
            return code;
        }
        if (check->parsed()) {
            return run_check(rates_text, angles_text, t_max, points, tolerance);
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "markov-scope: %s\n", err.what());
        return 1;
    }
    std::fprintf(stderr, "markov-scope: no subcommand given\n");
    return 1;
}
