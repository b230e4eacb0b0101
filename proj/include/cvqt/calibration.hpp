#pragma once

// Feedforward-gain calibration: the classical-cancellation measurement
// that bounds |g - 1|, the classical (no-entanglement) teleportation
// noise floor, and a stepped-attenuator model for the electronic gain.

namespace cvqt {

/// Suppression reported when the cancellation residual is numerically
/// zero (exact unity gain); the implied gain bound is capped accordingly.
inline constexpr double kSuppressionFloorCapDb = 240.0;

struct CancellationResult {
    double suppression_x_db = 0.0;
    double suppression_p_db = 0.0;
    double gain_bound_x = 0.0;  ///< implied |gain - 1| = 10^(-S/20)
    double gain_bound_p = 0.0;
    bool x_at_floor = false;    ///< residual numerically zero; values capped
    bool p_at_floor = false;
};

/// |gain - 1| implied by a measured suppression: 10^(-suppression_db / 20).
double gain_bound_from_suppression(double suppression_db);

/// Run the cancellation measurement in simulation: teleport with vacuum
/// arms (r = 0) and a probe tone applied at both squeezer outputs, once at
/// the given gains and once at gain 0.  The residual tone amplitude
/// relative to the gain-0 run gives the suppression per quadrature.
CancellationResult simulate_cancellation(double gain_x, double gain_p, double tone_amplitude);

/// Output variance (per quadrature, shot-noise units) of the classical
/// protocol, obtained by actually running the teleporter with vacuum arms
/// at unity gain; equals 3 (two units of excess noise on top of vacuum).
double classical_floor();

/// Snap an amplitude gain to the nearest step of a stepped attenuator
/// with the given dB granularity.  Requires gain >= 0 and step_db > 0;
/// gain 0 stays 0.
double quantize_gain(double gain, double step_db);

}  // namespace cvqt
