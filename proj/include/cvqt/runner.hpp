#pragma once

// Implementations of the command-line subcommands, kept in the library so
// tests can drive them without spawning processes.  Each returns the full
// output text (CSV table or JSON document); the CLI only parses flags and
// writes the result to stdout or a file.

#include "cvqt/config_io.hpp"
#include "cvqt/opo.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cvqt::runner {

enum class Format { Table, Report };

/// Command-line overrides applied on top of a loaded config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> shots;
    std::optional<int> workers;
    std::optional<Engine> engine;
};

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides);

/// Single run with the configured engine.  Report format is the JSON run
/// report; table format is a one-row CSV.
std::string run_teleport(const ExperimentConfig& config, Format format);

/// Deterministic-engine sweep over both gains.  The grid comes from
/// `sweep` when given, otherwise from the config's sweep block.
std::string run_gain_sweep(const ExperimentConfig& config, std::optional<SweepSpec> sweep,
                           Format format);

/// Chain of identical hops; each row's fidelity is measured against the
/// original input, and rows where it falls below the classical 1/2 are
/// flagged.
std::string run_sequential_chain(const ExperimentConfig& config, std::optional<int> steps,
                                 Format format);

/// Squeezing spectrum rows over sideband frequency 0..max_freq_mhz
/// (inclusive, `points` samples); jitter_rms_deg of `params` is applied
/// to each row.
std::string run_opo_spectrum(const OpoParams& params, double max_freq_mhz, int points,
                             Format format);

struct CalibrateRequest {
    /// Simulate-cancellation mode: run the probe-tone measurement at
    /// these gains (gain_p defaults to gain_x).
    std::optional<double> gain_x;
    std::optional<double> gain_p;
    double tone_amplitude = 1000.0;

    /// Bound-only mode: convert a measured suppression to a gain bound.
    std::optional<double> suppression_db;

    /// Optionally also report the gains snapped to this attenuator step.
    std::optional<double> quantize_step_db;
};

std::string run_calibrate(const CalibrateRequest& request, Format format);

}  // namespace cvqt::runner
