#pragma once

// Figures of merit for coherent-state teleportation: fidelity formulas,
// the sequential-operation capacity they imply, and dB conversions.
// Variances are in shot-noise units (vacuum = 1).

#include <Eigen/Dense>

namespace cvqt {

/// 10 * log10(linear).  Requires linear > 0.
double to_db(double linear);

/// 10^(db / 10).
double from_db(double db);

/// Fidelity after n sequential teleportation hops through an EPR resource
/// with squeezing parameter r, each hop adding 2 e^{-2r} of excess noise:
/// F = 1 / (1 + n e^{-2r}).  One classical hop (r = 0) gives F = 1/2.
double fidelity_theory(double r, double n_units);

/// Fidelity of a Gaussian output state against the coherent input it
/// should reproduce, for unity amplitude gain and uncorrelated
/// quadratures: F = 2 / sqrt((1 + sigma_x) * (1 + sigma_p)).
double fidelity_from_variances(double sigma_x, double sigma_p);

/// General single-mode version: output covariance `cov` (2x2) and mean
/// offset `delta` = output mean - input mean, both in shot-noise units:
///   F = 2 / sqrt(det(I + cov)) * exp(-delta^T (I + cov)^{-1} delta / 2).
/// Reduces to fidelity_from_variances for diagonal cov and zero offset.
double fidelity_gaussian(const Eigen::Matrix2d& cov, const Eigen::Vector2d& delta);

/// Number of sequential teleportation steps the measured fidelity can
/// support before dropping to the classical value, and the squeezing
/// parameter that number corresponds to: n_s = F / (1 - F),
/// r_eff = ln(n_s) / 2 (so that n_s = e^{2 r_eff}).
struct SequentialCapacity {
    double n_s = 0.0;
    double r_eff = 0.0;
};

/// Requires fidelity in (0, 1).
SequentialCapacity sequential_capacity(double fidelity);

}  // namespace cvqt
