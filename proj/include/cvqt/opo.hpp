#pragma once

// Below-threshold optical parametric oscillator model: maps measured pump
// gain, detection efficiency, sideband frequency and phase-lock jitter to
// the squeezed / anti-squeezed quadrature variances available as an EPR
// resource.  All variances are in shot-noise units (vacuum = 1).

#include <cstdint>

namespace cvqt {

struct OpoParams {
    /// Observed parametric amplification of a seed locked to the amplified
    /// phase: G+ = 1 / (1 - x)^2 where x is the pump amplitude relative to
    /// threshold.  G+ = 1 means no pump.
    double pump_gain = 1.0;

    /// Total detection efficiency (propagation, homodyne, mode match).
    double efficiency = 1.0;

    /// RMS phase-lock error in degrees (applied by jitter_average).
    double jitter_rms_deg = 0.0;

    /// Measurement sideband frequency and cavity half-width (same units).
    double sideband_mhz = 0.0;
    double cavity_hwhm_mhz = 10.0;

    /// Throws std::invalid_argument when any field is out of range.
    void validate() const;

    bool operator==(const OpoParams&) const = default;
};

/// Squeezed and anti-squeezed quadrature variances (linear, shot-noise
/// units).  For a lossless OPO at any sideband, squeezed * antisqueezed = 1.
struct SqueezeLevels {
    double squeezed = 1.0;
    double antisqueezed = 1.0;

    double squeezed_db() const;
    double antisqueezed_db() const;
};

/// Pump amplitude relative to threshold, x = 1 - 1/sqrt(G+).
/// Requires pump_gain >= 1.
double pump_ratio_from_gain(double pump_gain);

/// Standard below-threshold OPO noise spectra at the given sideband:
///   S-+ = 1 -+ eta * 4x / ((1 +- x)^2 + (f / hwhm)^2).
/// Jitter is not applied here; see jitter_average.
SqueezeLevels squeezing_spectrum(const OpoParams& params);

/// Deterministic phase-jitter average: each quadrature picks up the other
/// one's noise weighted by sin^2 of the RMS lock error.
SqueezeLevels jitter_average(const SqueezeLevels& levels, double theta_rms_deg);

/// Monte Carlo version of jitter_average: draws Gaussian lock errors with
/// the given RMS and averages cos^2/sin^2 mixing over them.  Used to
/// cross-check the deterministic map.
SqueezeLevels jitter_average_mc(const SqueezeLevels& levels, double theta_rms_deg,
                                long draws, std::uint64_t seed);

/// Squeezing parameter r with e^{-2r} equal to the squeezed variance.
/// Requires levels.squeezed > 0.
double effective_r(const SqueezeLevels& levels);

}  // namespace cvqt
