#pragma once

// Shared internals of the deterministic and Monte Carlo teleporter
// engines.  Not installed; include only from src/.

#include "cvqt/gaussian.hpp"
#include "cvqt/teleporter.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cvqt::detail {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) {
    return deg * kPi / 180.0;
}

/// Config with derived quantities filled in: squeezer variances resolved,
/// gains quantized (when requested) and jitters converted to radians.
struct ResolvedConfig {
    SqueezeLevels lv_a;
    SqueezeLevels lv_b;
    double gain_x = 1.0;
    double gain_p = 1.0;
    double cx = 0.0;  ///< feedforward coefficient sqrt(2) gain_x / sqrt(eta.alice_x)
    double cp = 0.0;
    Efficiencies eta;
    double j_sa = 0.0;  ///< lock jitters, radians
    double j_sb = 0.0;
    double j_epr = 0.0;
    double j_alice = 0.0;
    double j_victor = 0.0;
    bool any_shot_jitter = false;
    Eigen::Vector2d input_mean = Eigen::Vector2d::Zero();
    double probe_tone = 0.0;
};

ResolvedConfig resolve(const TeleporterConfig& config);

/// Configured coherent input as a 1-mode state.
GaussianState input_state(const ResolvedConfig& rc);

/// Definite lock angles (radians) for one Monte Carlo shot.
struct LockAngles {
    double sa = 0.0;
    double sb = 0.0;
    double epr = 0.0;
    double alice = 0.0;
};

/// Build the 3-mode state just before Alice's measurements.  Mode order on
/// return: 0 = Alice's x port, 1 = Alice's p port, 2 = Bob.  When
/// `sampled` is null, lock jitter enters as the deterministic two-point
/// phase mixture; otherwise as definite rotations by the sampled angles.
GaussianState premeasurement_state(const ResolvedConfig& rc, const GaussianState& input,
                                   const LockAngles* sampled, StateAudit* audit);

/// One Monte Carlo shot through the generic Gaussian circuit.  Draw order
/// (standard normals, skipped when the corresponding knob is zero):
/// lock angles (squeezer a, squeezer b, EPR, Alice), Alice's x outcome,
/// Alice's p outcome, verification lock angle, verification outcome.
ShotRecord simulate_shot_circuit(const ResolvedConfig& rc, const GaussianState& input,
                                 bool victor_x, std::mt19937_64& rng);

/// Contiguous (start, count) chunk per worker; counts differ by at most 1.
std::vector<std::pair<long, long>> partition_shots(long shots, int workers);

/// Per-worker generator: seeded from the run seed and the worker index.
std::mt19937_64 worker_rng(std::uint64_t seed, int worker);

/// Streaming moments of the verification outcomes, split by quadrature.
struct MomentAccumulator {
    long n_x = 0;
    long n_p = 0;
    double sum_x = 0.0;
    double sumsq_x = 0.0;
    double sum_p = 0.0;
    double sumsq_p = 0.0;

    void add(const ShotRecord& rec);
    void merge(const MomentAccumulator& other);
};

/// Report (moments, fidelity, standard errors) from merged accumulators.
TeleportReport report_from_moments(const ResolvedConfig& rc, const TeleporterConfig& config,
                                   const MomentAccumulator& acc);

/// Fill in fidelity / n_s / r_eff / dB fields from the moment fields.
void finish_report(TeleportReport& report, const Eigen::Matrix2d& cov,
                   const Eigen::Vector2d& mean, const Eigen::Vector2d& reference_mean);

}  // namespace cvqt::detail
