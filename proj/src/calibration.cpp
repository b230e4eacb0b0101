#include "cvqt/calibration.hpp"

#include "cvqt/metrics.hpp"
#include "cvqt/teleporter.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

/// Residual below this fraction of the direct tone counts as numerically
/// perfect cancellation.
constexpr double kFloorRatio = 1e-12;

TeleporterConfig cancellation_config(double gain_x, double gain_p, double tone) {
    TeleporterConfig cfg;  // vacuum arms: r defaults to 0
    cfg.gain_x = gain_x;
    cfg.gain_p = gain_p;
    cfg.probe_tone = tone;
    return cfg;
}

}  // namespace

double gain_bound_from_suppression(double suppression_db) {
    require(std::isfinite(suppression_db) && suppression_db >= 0.0,
            "gain_bound_from_suppression: suppression must be >= 0 dB");
    return std::pow(10.0, -suppression_db / 20.0);
}

CancellationResult simulate_cancellation(double gain_x, double gain_p, double tone_amplitude) {
    require(std::isfinite(tone_amplitude) && tone_amplitude > 0.0,
            "simulate_cancellation: tone amplitude must be > 0");
    const TeleportReport with_gain =
        run_heisenberg(cancellation_config(gain_x, gain_p, tone_amplitude));
    const TeleportReport no_feedforward =
        run_heisenberg(cancellation_config(0.0, 0.0, tone_amplitude));

    CancellationResult out;
    auto channel = [](double residual, double direct, double& supp_db, double& bound,
                      bool& at_floor) {
        const double ratio = std::abs(residual) / std::abs(direct);
        if (ratio < kFloorRatio) {
            at_floor = true;
            supp_db = kSuppressionFloorCapDb;
            bound = gain_bound_from_suppression(kSuppressionFloorCapDb);
        } else {
            at_floor = false;
            supp_db = -20.0 * std::log10(ratio);
            bound = ratio;
        }
    };
    channel(with_gain.mean_x, no_feedforward.mean_x, out.suppression_x_db, out.gain_bound_x,
            out.x_at_floor);
    channel(with_gain.mean_p, no_feedforward.mean_p, out.suppression_p_db, out.gain_bound_p,
            out.p_at_floor);
    return out;
}

double classical_floor() {
    TeleporterConfig cfg;  // vacuum arms, unity gain, no imperfections
    return run_heisenberg(cfg).sigma_x;
}

double quantize_gain(double gain, double step_db) {
    require(std::isfinite(gain) && gain >= 0.0, "quantize_gain: gain must be >= 0");
    require(std::isfinite(step_db) && step_db > 0.0, "quantize_gain: step_db must be > 0");
    if (gain == 0.0) {
        return 0.0;
    }
    const double attenuation_db = -20.0 * std::log10(gain);
    const double snapped = std::round(attenuation_db / step_db) * step_db;
    return std::pow(10.0, -snapped / 20.0);
}

}  // namespace cvqt
