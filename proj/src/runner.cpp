#include "cvqt/runner.hpp"

#include "cvqt/calibration.hpp"
#include "cvqt/errors.hpp"
#include "cvqt/metrics.hpp"
#include "cvqt/teleporter.hpp"
#include "cvqt/version.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cvqt::runner {

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

nlohmann::json document_header(const char* command) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    return j;
}

std::vector<double> sweep_grid(const SweepSpec& sweep) {
    std::vector<double> gains;
    gains.reserve(static_cast<size_t>(sweep.steps));
    for (int i = 0; i < sweep.steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(sweep.steps - 1);
        gains.push_back(sweep.g_min + (sweep.g_max - sweep.g_min) * t);
    }
    return gains;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides) {
    if (overrides.seed) {
        config.teleporter.seed = *overrides.seed;
    }
    if (overrides.shots) {
        config.teleporter.shots = *overrides.shots;
    }
    if (overrides.workers) {
        config.teleporter.workers = *overrides.workers;
    }
    if (overrides.engine) {
        config.teleporter.engine = *overrides.engine;
    }
    return config;
}

std::string run_teleport(const ExperimentConfig& config, Format format) {
    const TeleportReport rep = config.teleporter.engine == Engine::MonteCarlo
                                   ? run_monte_carlo(config.teleporter, false).report
                                   : run_heisenberg(config.teleporter);
    if (format == Format::Table) {
        std::ostringstream out;
        out << "engine,sigma_x,sigma_p,sigma_x_db,sigma_p_db,fidelity,n_s,r_eff,"
               "mean_x,mean_p,se_sigma_x,se_sigma_p,se_fidelity\n";
        out << engine_name(rep.engine) << ',' << fmt9(rep.sigma_x) << ',' << fmt9(rep.sigma_p)
            << ',' << fmt9(rep.sigma_x_db) << ',' << fmt9(rep.sigma_p_db) << ','
            << fmt9(rep.fidelity) << ',' << fmt9(rep.n_s) << ',' << fmt9(rep.r_eff) << ','
            << fmt9(rep.mean_x) << ',' << fmt9(rep.mean_p) << ',' << fmt9(rep.se_sigma_x)
            << ',' << fmt9(rep.se_sigma_p) << ',' << fmt9(rep.se_fidelity) << '\n';
        return out.str();
    }
    RunReport doc;
    doc.schema_version = kSchemaVersion;
    doc.tool_version = kToolVersion;
    doc.command = "teleport";
    doc.config = config_echo(config);
    doc.notes = config.notes;
    doc.report = rep;
    return serialize_run_report(doc);
}

std::string run_gain_sweep(const ExperimentConfig& config, std::optional<SweepSpec> sweep,
                           Format format) {
    if (!sweep) {
        sweep = config.sweep;
    }
    if (!sweep) {
        throw config_error(
            "no gain sweep specified: add sweep.g_min/g_max/steps to the config "
            "or pass --g-min/--g-max/--steps");
    }
    if (sweep->steps < 2 || !(sweep->g_min <= sweep->g_max)) {
        throw config_error("gain sweep needs steps >= 2 and g_min <= g_max");
    }
    const std::vector<GainSweepRow> rows = sweep_gain(config.teleporter, sweep_grid(*sweep));
    if (format == Format::Table) {
        std::ostringstream out;
        out << "gain,sigma_x,sigma_p,sigma_x_db,sigma_p_db,fidelity,n_s\n";
        for (const auto& row : rows) {
            out << fmt9(row.gain) << ',' << fmt9(row.sigma_x) << ',' << fmt9(row.sigma_p)
                << ',' << fmt9(row.sigma_x_db) << ',' << fmt9(row.sigma_p_db) << ','
                << fmt9(row.fidelity) << ',' << fmt9(row.n_s) << '\n';
        }
        return out.str();
    }
    nlohmann::json doc = document_header("sweep-gain");
    doc["config"] = config_echo(config);
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["gain"] = row.gain;
        r["sigma_x"] = row.sigma_x;
        r["sigma_p"] = row.sigma_p;
        r["sigma_x_db"] = row.sigma_x_db;
        r["sigma_p_db"] = row.sigma_p_db;
        r["fidelity"] = row.fidelity;
        r["n_s"] = row.n_s;
        jrows.push_back(r);
    }
    doc["rows"] = jrows;
    return doc.dump(2) + "\n";
}

std::string run_sequential_chain(const ExperimentConfig& config, std::optional<int> steps,
                                 Format format) {
    if (!steps) {
        steps = config.sequential_steps;
    }
    if (!steps) {
        throw config_error(
            "no chain length specified: add sequential.steps to the config or pass --steps");
    }
    const SequentialResult res = run_sequential(config.teleporter, *steps);
    int first_below = 0;
    for (size_t k = 0; k < res.steps.size(); ++k) {
        if (res.steps[k].fidelity < 0.5) {
            first_below = static_cast<int>(k) + 1;
            break;
        }
    }
    if (format == Format::Table) {
        std::ostringstream out;
        out << "step,sigma_x,sigma_p,sigma_x_db,sigma_p_db,fidelity,n_s,below_classical\n";
        for (size_t k = 0; k < res.steps.size(); ++k) {
            const TeleportReport& rep = res.steps[k];
            out << (k + 1) << ',' << fmt9(rep.sigma_x) << ',' << fmt9(rep.sigma_p) << ','
                << fmt9(rep.sigma_x_db) << ',' << fmt9(rep.sigma_p_db) << ','
                << fmt9(rep.fidelity) << ',' << fmt9(rep.n_s) << ','
                << (rep.fidelity < 0.5 ? 1 : 0) << '\n';
        }
        return out.str();
    }
    nlohmann::json doc = document_header("sequential");
    doc["config"] = config_echo(config);
    doc["final_fidelity"] = res.final_fidelity;
    doc["first_below_classical"] = first_below;  // 0: never within the range run
    nlohmann::json jrows = nlohmann::json::array();
    for (size_t k = 0; k < res.steps.size(); ++k) {
        const TeleportReport& rep = res.steps[k];
        nlohmann::json r;
        r["step"] = k + 1;
        r["sigma_x"] = rep.sigma_x;
        r["sigma_p"] = rep.sigma_p;
        r["sigma_x_db"] = rep.sigma_x_db;
        r["sigma_p_db"] = rep.sigma_p_db;
        r["fidelity"] = rep.fidelity;
        r["n_s"] = rep.n_s;
        r["below_classical"] = rep.fidelity < 0.5;
        jrows.push_back(r);
    }
    doc["rows"] = jrows;
    return doc.dump(2) + "\n";
}

std::string run_opo_spectrum(const OpoParams& params, double max_freq_mhz, int points,
                             Format format) {
    params.validate();
    if (!(std::isfinite(max_freq_mhz) && max_freq_mhz > 0.0)) {
        throw std::invalid_argument("opo spectrum: max frequency must be > 0");
    }
    if (points < 2 || points > 100000) {
        throw std::invalid_argument("opo spectrum: points must be in [2, 100000]");
    }
    struct Row {
        double freq;
        SqueezeLevels levels;
    };
    std::vector<Row> rows;
    rows.reserve(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) {
        OpoParams p = params;
        p.sideband_mhz = max_freq_mhz * static_cast<double>(i) / static_cast<double>(points - 1);
        rows.push_back(Row{p.sideband_mhz,
                           jitter_average(squeezing_spectrum(p), params.jitter_rms_deg)});
    }
    if (format == Format::Table) {
        std::ostringstream out;
        out << "freq_mhz,squeezed,antisqueezed,squeezed_db,antisqueezed_db,product\n";
        for (const auto& row : rows) {
            out << fmt9(row.freq) << ',' << fmt9(row.levels.squeezed) << ','
                << fmt9(row.levels.antisqueezed) << ',' << fmt9(row.levels.squeezed_db()) << ','
                << fmt9(row.levels.antisqueezed_db()) << ','
                << fmt9(row.levels.squeezed * row.levels.antisqueezed) << '\n';
        }
        return out.str();
    }
    nlohmann::json doc = document_header("opo-spectrum");
    nlohmann::json jp;
    jp["pump_gain"] = params.pump_gain;
    jp["efficiency"] = params.efficiency;
    jp["jitter_rms_deg"] = params.jitter_rms_deg;
    jp["cavity_hwhm_mhz"] = params.cavity_hwhm_mhz;
    doc["params"] = jp;
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["freq_mhz"] = row.freq;
        r["squeezed"] = row.levels.squeezed;
        r["antisqueezed"] = row.levels.antisqueezed;
        r["squeezed_db"] = row.levels.squeezed_db();
        r["antisqueezed_db"] = row.levels.antisqueezed_db();
        r["product"] = row.levels.squeezed * row.levels.antisqueezed;
        jrows.push_back(r);
    }
    doc["rows"] = jrows;
    return doc.dump(2) + "\n";
}

std::string run_calibrate(const CalibrateRequest& request, Format format) {
    const bool simulate = request.gain_x.has_value() || request.gain_p.has_value();
    const bool bound_only = request.suppression_db.has_value();
    if (simulate == bound_only) {
        throw config_error(
            "calibrate needs either --gain-x (and optionally --gain-p) or --suppression-db");
    }
    const double floor = classical_floor();
    if (bound_only) {
        const double bound = gain_bound_from_suppression(*request.suppression_db);
        if (format == Format::Table) {
            std::ostringstream out;
            out << "suppression_db,gain_bound,classical_floor\n";
            out << fmt9(*request.suppression_db) << ',' << fmt9(bound) << ',' << fmt9(floor)
                << '\n';
            return out.str();
        }
        nlohmann::json doc = document_header("calibrate");
        nlohmann::json c;
        c["mode"] = "bound";
        c["suppression_db"] = *request.suppression_db;
        c["gain_bound"] = bound;
        c["classical_floor"] = floor;
        doc["calibration"] = c;
        return doc.dump(2) + "\n";
    }

    const double gx = *request.gain_x;
    const double gp = request.gain_p.value_or(gx);
    const CancellationResult res = simulate_cancellation(gx, gp, request.tone_amplitude);
    if (format == Format::Table) {
        std::ostringstream out;
        out << "gain_x,gain_p,suppression_x_db,suppression_p_db,gain_bound_x,gain_bound_p,"
               "x_at_floor,p_at_floor,classical_floor\n";
        out << fmt9(gx) << ',' << fmt9(gp) << ',' << fmt9(res.suppression_x_db) << ','
            << fmt9(res.suppression_p_db) << ',' << fmt9(res.gain_bound_x) << ','
            << fmt9(res.gain_bound_p) << ',' << (res.x_at_floor ? 1 : 0) << ','
            << (res.p_at_floor ? 1 : 0) << ',' << fmt9(floor) << '\n';
        return out.str();
    }
    nlohmann::json doc = document_header("calibrate");
    nlohmann::json c;
    c["mode"] = "simulate";
    c["gain_x"] = gx;
    c["gain_p"] = gp;
    c["tone_amplitude"] = request.tone_amplitude;
    c["suppression_x_db"] = res.suppression_x_db;
    c["suppression_p_db"] = res.suppression_p_db;
    c["gain_bound_x"] = res.gain_bound_x;
    c["gain_bound_p"] = res.gain_bound_p;
    c["x_at_floor"] = res.x_at_floor;
    c["p_at_floor"] = res.p_at_floor;
    c["classical_floor"] = floor;
    if (request.quantize_step_db) {
        c["quantize_step_db"] = *request.quantize_step_db;
        c["gain_x_quantized"] = quantize_gain(gx, *request.quantize_step_db);
        c["gain_p_quantized"] = quantize_gain(gp, *request.quantize_step_db);
    }
    doc["calibration"] = c;
    return doc.dump(2) + "\n";
}

}  // namespace cvqt::runner
