#pragma once

// Continuous-variable teleportation of a single optical mode.
//
// Circuit (mode indices in parentheses):
//
//   input (0) ----------------------------+
//                                         |  50:50          x measurement -> g_x
//   squeezer a (1) --+  50:50             +--[ Alice ]--<   p measurement -> g_p
//                    +--[ EPR ]-- A ------+                        |
//   squeezer b (2) --+   pi/2     B --(loss)-- displace(g_x x, g_p p) --> output
//
// Both EPR arms are squeezed in x; the pi/2 relative phase at the EPR
// beam splitter crosses the noise ellipses so that x_A - x_B is set by
// arm a and p_A + p_B by arm b.  Alice mixes the input with arm A on a
// balanced beam splitter and measures x on one port and p on the other;
// Bob displaces arm B by sqrt(2) * gain times the outcomes.  A verifying
// homodyne station ("Victor") with its own efficiency and local-oscillator
// jitter reads out the result.
//
// Imperfections: per-arm propagation loss, detection efficiency of each
// homodyne (Alice's feedforward electronic gain is compensated by
// 1/sqrt(eta) so that the end-to-end amplitude gain stays equal to the
// configured gain), and five phase locks with independent RMS jitter.
//
// Two engines produce the same physics:
//  * heisenberg: propagates means and covariances once, deterministically
//    (jitter enters through the symmetric two-point phase mixture).
//  * monte_carlo: samples per-shot lock angles, homodyne outcomes and
//    verification values; statistics converge to the heisenberg moments.

#include "cvqt/gaussian.hpp"
#include "cvqt/opo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cvqt {

/// How a squeezed arm is specified.
enum class SqueezerKind {
    DirectR,      ///< pure squeezing parameter r
    SqueezingDb,  ///< measured squeezed-quadrature level in dB (pure state)
    Opo,          ///< full OPO model (loss makes the arm mixed)
};

struct SqueezerSpec {
    SqueezerKind kind = SqueezerKind::DirectR;
    double r = 0.0;             ///< DirectR
    double squeezing_db = 0.0;  ///< SqueezingDb; negative means squeezed
    OpoParams opo;              ///< Opo

    /// Resolve to quadrature variances (shot-noise units).
    SqueezeLevels levels() const;

    void validate() const;

    bool operator==(const SqueezerSpec&) const = default;
};

/// Intensity transmissions in [0, 1]; 1 = lossless.
struct Efficiencies {
    double path_a = 1.0;   ///< squeezer a -> Alice propagation
    double path_b = 1.0;   ///< squeezer b -> Bob propagation
    double alice_x = 1.0;  ///< Alice's x homodyne detection
    double alice_p = 1.0;  ///< Alice's p homodyne detection
    double victor = 1.0;   ///< verification homodyne detection

    bool operator==(const Efficiencies&) const = default;
};

/// RMS phase-lock errors in degrees for the five locks in the setup.
struct JitterSpec {
    double squeezer_a_deg = 0.0;  ///< pump phase of squeezer a
    double squeezer_b_deg = 0.0;  ///< pump phase of squeezer b
    double epr_hbs_deg = 0.0;     ///< relative phase at the EPR beam splitter
    double alice_hbs_deg = 0.0;   ///< relative phase at Alice's beam splitter
    double victor_lo_deg = 0.0;   ///< verification local oscillator

    bool operator==(const JitterSpec&) const = default;
};

/// Coherent input state (vacuum = zero mean), shot-noise-unit means.
struct InputSpec {
    double mean_x = 0.0;
    double mean_p = 0.0;

    bool operator==(const InputSpec&) const = default;
};

enum class Engine { Heisenberg, MonteCarlo };

struct TeleporterConfig {
    SqueezerSpec squeezer_a;
    SqueezerSpec squeezer_b;
    double gain_x = 1.0;
    double gain_p = 1.0;
    Efficiencies eta;
    JitterSpec jitter;
    InputSpec input;

    /// Optional phase-quadrature probe tone of this amplitude added at
    /// both squeezer outputs; with r = 0 it measures how well the
    /// feedforward cancels Bob's share of the EPR signal (the residual
    /// amplitude in each quadrature is (gain - 1) * tone / sqrt(2)).
    double probe_tone = 0.0;

    /// When > 0, amplitude gains are snapped to the nearest attenuator
    /// step of this many dB before the run (models a stepped attenuator
    /// in the feedforward chain).
    double gain_step_db = 0.0;

    Engine engine = Engine::Heisenberg;
    long shots = 100000;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;

    bool operator==(const TeleporterConfig&) const = default;
};

/// Moments and figures of merit of one run, as seen by the verification
/// station (its efficiency and jitter are included in these numbers).
struct TeleportReport {
    double sigma_x = 0.0;  ///< output x variance, shot-noise units
    double sigma_p = 0.0;
    double sigma_x_db = 0.0;
    double sigma_p_db = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double fidelity = 0.0;
    double n_s = 0.0;    ///< sequential capacity F / (1 - F)
    double r_eff = 0.0;  ///< ln(n_s) / 2

    Engine engine = Engine::Heisenberg;
    long shots = 0;        ///< 0 for the deterministic engine
    std::uint64_t seed = 0;
    int workers = 1;
    double se_sigma_x = 0.0;  ///< standard errors (Monte Carlo only)
    double se_sigma_p = 0.0;
    double se_fidelity = 0.0;

    bool operator==(const TeleportReport&) const = default;
};

/// One Monte Carlo shot: Alice's two outcomes, the applied displacement,
/// and the verification measurement (quadrature alternates with the
/// global shot index: even shots measure X, odd shots P).
struct ShotRecord {
    double x_u = 0.0;  ///< Alice's x outcome
    double p_v = 0.0;  ///< Alice's p outcome
    double dx = 0.0;   ///< displacement applied to Bob's mode
    double dp = 0.0;
    Quadrature victor_quad = Quadrature::X;
    double victor_value = 0.0;
};

using TeleportTrace = std::vector<ShotRecord>;

struct MonteCarloResult {
    TeleportReport report;
    TeleportTrace trace;  ///< empty when keep_trace = false
};

/// Named intermediate states recorded while the deterministic engine
/// runs; used to audit physicality after every step.
struct StateAudit {
    std::vector<std::pair<std::string, GaussianState>> states;
};

/// Imperfections applied while preparing an EPR pair on its own.
struct EprImperfections {
    double eta_a = 1.0;
    double eta_b = 1.0;
    double jitter_a_deg = 0.0;
    double jitter_b_deg = 0.0;
    double jitter_hbs_deg = 0.0;
};

/// Two-mode EPR state from x-squeezed inputs with parameters r_a, r_b,
/// combined with a pi/2 relative phase; losses applied after the beam
/// splitter.  Ideal correlations: Var(x_A - x_B) = 2 e^{-2 r_a},
/// Var(p_A + p_B) = 2 e^{-2 r_b}.
GaussianState build_epr(double r_a, double r_b, const EprImperfections& imp = {});

/// Deterministic run on the configured input.
TeleportReport run_heisenberg(const TeleporterConfig& config, StateAudit* audit = nullptr);

/// Deterministic run on an explicit input state (1 mode).  `reference_mean`
/// is the coherent mean the output is compared against for fidelity (pass
/// the input mean for a single hop).  Returns the report, Bob's output
/// state before the verification station, and the verified view.
struct HeisenbergRun {
    TeleportReport report;
    GaussianState bob_out;
    GaussianState victor_view;
};
HeisenbergRun run_heisenberg_state(const TeleporterConfig& config, const GaussianState& input,
                                   const Eigen::Vector2d& reference_mean,
                                   StateAudit* audit = nullptr);

/// Monte Carlo run with the OpenMP production engine.  Shots are split
/// into `workers` contiguous chunks, each with its own RNG seeded from
/// (seed, worker index), and partial statistics are merged in worker
/// order, so results are bit-identical for a fixed (seed, workers) pair
/// regardless of how many threads actually execute.
MonteCarloResult run_monte_carlo(const TeleporterConfig& config, bool keep_trace = true);

/// One row of a gain sweep (both gains set to `gain`, deterministic engine).
struct GainSweepRow {
    double gain = 0.0;
    double sigma_x = 0.0;
    double sigma_p = 0.0;
    double sigma_x_db = 0.0;
    double sigma_p_db = 0.0;
    double fidelity = 0.0;
    double n_s = 0.0;
};

std::vector<GainSweepRow> sweep_gain(const TeleporterConfig& config,
                                     const std::vector<double>& gains);

/// Chain `steps` identical teleporters, feeding Bob's output of one hop
/// into the next (deterministic engine).  Each report compares the state
/// after k hops against the original input, so with ideal unity-gain
/// settings fidelity follows F_k = 1 / (1 + k e^{-2r}).
struct SequentialResult {
    std::vector<TeleportReport> steps;
    double final_fidelity = 0.0;
};

SequentialResult run_sequential(const TeleporterConfig& config, int steps);

}  // namespace cvqt
