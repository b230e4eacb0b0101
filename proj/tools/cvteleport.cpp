// Command-line front end.  All the work happens in the library (see
// cvqt/runner.hpp); this file only parses flags, picks output formats and
// maps error categories to exit codes:
//   0  success
//   2  config problem (file syntax, unknown keys, bad flags)
//   3  validation problem (out-of-range physics values, corrupted states)
//   1  anything else

#include "CLI11.hpp"

#include "cvqt/config_io.hpp"
#include "cvqt/errors.hpp"
#include "cvqt/runner.hpp"
#include "cvqt/version.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

cvqt::runner::Format parse_format(const std::string& text, cvqt::runner::Format fallback) {
    if (text.empty()) {
        return fallback;
    }
    if (text == "table") {
        return cvqt::runner::Format::Table;
    }
    if (text == "report") {
        return cvqt::runner::Format::Report;
    }
    throw cvqt::config_error("unknown --format '" + text + "' (expected table or report)");
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + out_path + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing output file '" + out_path + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-variable teleportation simulator for Gaussian optical states"};
    app.set_version_flag("--version", std::string("cvteleport ") + cvqt::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format_str;
    std::string engine_str;
    std::optional<std::uint64_t> seed;
    std::optional<long> shots;
    std::optional<int> workers;

    auto add_common = [&](CLI::App* cmd, bool with_config, bool with_overrides) {
        if (with_config) {
            cmd->add_option("--config", config_path, "Experiment config file")->required();
        }
        cmd->add_option("--out", out_path, "Write output here instead of stdout");
        cmd->add_option("--format", format_str, "Output format: table or report (JSON)");
        if (with_overrides) {
            cmd->add_option("--seed", seed, "Override the config seed");
            cmd->add_option("--shots", shots, "Override the config shot count");
            cmd->add_option("--workers", workers, "Override the config worker count");
            cmd->add_option("--engine", engine_str, "Override the engine");
        }
    };

    CLI::App* teleport = app.add_subcommand(
        "teleport", "Run one teleportation; report output moments and fidelity");
    add_common(teleport, true, true);

    CLI::App* sweep = app.add_subcommand(
        "sweep-gain", "Deterministic sweep of the feedforward gain");
    std::optional<double> g_min;
    std::optional<double> g_max;
    std::optional<int> sweep_steps;
    add_common(sweep, true, false);
    sweep->add_option("--g-min", g_min, "Lowest gain");
    sweep->add_option("--g-max", g_max, "Highest gain");
    sweep->add_option("--steps", sweep_steps, "Number of grid points");

    CLI::App* sequential = app.add_subcommand(
        "sequential", "Chain identical hops and track fidelity against the original input");
    std::optional<int> chain_steps;
    add_common(sequential, true, false);
    sequential->add_option("--steps", chain_steps, "Number of hops");

    CLI::App* opo = app.add_subcommand(
        "opo-spectrum", "Squeezing spectrum of a below-threshold OPO");
    cvqt::OpoParams opo_params;
    double max_freq_mhz = 10.0;
    int points = 41;
    add_common(opo, false, false);
    opo->add_option("--pump-gain", opo_params.pump_gain, "Parametric gain G+")->required();
    opo->add_option("--efficiency", opo_params.efficiency, "Total detection efficiency");
    opo->add_option("--jitter-deg", opo_params.jitter_rms_deg, "RMS lock error in degrees");
    opo->add_option("--bandwidth-mhz", opo_params.cavity_hwhm_mhz, "Cavity half-width");
    opo->add_option("--max-freq-mhz", max_freq_mhz, "Top of the sideband grid");
    opo->add_option("--points", points, "Number of grid points");

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "Gain calibration: cancellation measurement and implied gain bound");
    cvqt::runner::CalibrateRequest cal;
    add_common(calibrate, false, false);
    calibrate->add_option("--gain-x", cal.gain_x, "Feedforward gain to test (x channel)");
    calibrate->add_option("--gain-p", cal.gain_p, "Feedforward gain (p channel)");
    calibrate->add_option("--tone", cal.tone_amplitude, "Probe tone amplitude");
    calibrate->add_option("--suppression-db", cal.suppression_db,
                          "Convert a measured suppression to a gain bound");
    calibrate->add_option("--quantize-step-db", cal.quantize_step_db,
                          "Also report gains snapped to this attenuator step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // Usage problems are config problems; --help/--version exit 0.
        return code == 0 ? 0 : 2;
    }

    using cvqt::runner::Format;
    try {
        cvqt::runner::Overrides overrides;
        overrides.seed = seed;
        overrides.shots = shots;
        overrides.workers = workers;
        if (!engine_str.empty()) {
            overrides.engine = cvqt::engine_from_name(engine_str);
        }

        std::string output;
        if (teleport->parsed()) {
            const auto cfg = cvqt::runner::apply_overrides(
                cvqt::load_experiment_config(config_path), overrides);
            output = cvqt::runner::run_teleport(cfg, parse_format(format_str, Format::Report));
        } else if (sweep->parsed()) {
            const auto cfg = cvqt::load_experiment_config(config_path);
            std::optional<cvqt::SweepSpec> requested;
            if (g_min || g_max || sweep_steps) {
                if (!(g_min && g_max && sweep_steps)) {
                    throw cvqt::config_error(
                        "--g-min, --g-max and --steps must be given together");
                }
                requested = cvqt::SweepSpec{*g_min, *g_max, *sweep_steps};
            }
            output = cvqt::runner::run_gain_sweep(cfg, requested,
                                                  parse_format(format_str, Format::Table));
        } else if (sequential->parsed()) {
            const auto cfg = cvqt::load_experiment_config(config_path);
            output = cvqt::runner::run_sequential_chain(
                cfg, chain_steps, parse_format(format_str, Format::Table));
        } else if (opo->parsed()) {
            output = cvqt::runner::run_opo_spectrum(opo_params, max_freq_mhz, points,
                                                    parse_format(format_str, Format::Table));
        } else if (calibrate->parsed()) {
            output = cvqt::runner::run_calibrate(cal, parse_format(format_str, Format::Report));
        }
        write_output(output, out_path);
        return 0;
    } catch (const cvqt::config_error& e) {
        std::cerr << "config error: " << e.what();
        if (e.line() > 0) {
            std::cerr << " (line " << e.line() << ")";
        }
        std::cerr << "\n";
        return 2;
    } catch (const cvqt::corrupt_state_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
