#pragma once

// Multimode Gaussian states of optical field modes and the linear-optics
// operations on them: symplectic transforms, loss channels, phase-jitter
// averaging, homodyne measurement with conditional update, displacement.
//
// Conventions used throughout this library:
//
//  * Quadrature ordering is interleaved: (x1, p1, x2, p2, ...).
//  * Variances are in shot-noise units: vacuum has unit variance in every
//    quadrature.  dB figures elsewhere are 10*log10 of these numbers.
//    (In the hbar = 1/2 convention the vacuum variance is 1/4; multiply
//    those covariances by 4 to get ours.)
//  * A coherent amplitude alpha has mean (2 Re alpha, 2 Im alpha); the
//    factor is kCoherentMeanScale.
//  * phase_shift(theta) advances a mode's annihilation operator by
//    e^{i theta}:  x' = x cos(theta) - p sin(theta),
//                  p' = x sin(theta) + p cos(theta).
//  * squeeze(r, angle=0) maps x -> e^{-r} x, p -> e^{+r} p (r > 0 squeezes
//    the x quadrature); `angle` rotates the squeezing axis.
//  * beam_splitter(i, j, T, phi) first advances mode j by the relative
//    phase phi, then applies the real mixer
//        a_i' =  sqrt(T) a_i + sqrt(1-T) a_j,
//        a_j' = -sqrt(1-T) a_i + sqrt(T) a_j.

#include <Eigen/Dense>

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace cvqt {

/// Mean of a coherent state with amplitude alpha is 2*alpha in these units.
inline constexpr double kCoherentMeanScale = 2.0;

/// Largest tolerated violation of S * Omega * S^T = Omega.
inline constexpr double kSymplecticTol = 1e-10;

/// Symplectic eigenvalues must stay >= 1 - kPhysicalityTol.
inline constexpr double kPhysicalityTol = 1e-9;

/// Largest tolerated asymmetry |cov - cov^T| in a state covariance.
inline constexpr double kSymmetryTol = 1e-12;

enum class Quadrature { X, P };

/// Index of quadrature `q` of mode `mode` in the interleaved layout.
inline int quad_index(int mode, Quadrature q) {
    return 2 * mode + (q == Quadrature::P ? 1 : 0);
}

/// Standard symplectic form for n modes: block-diagonal [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

/// Draw one standard-normal variate.  A fresh distribution object is used
/// for every call so the number of engine invocations consumed by the k-th
/// draw never depends on the call site; independently seeded generators
/// therefore produce identical draw sequences in every code path.
double draw_std_normal(std::mt19937_64& rng);

/// Gaussian state: mean vector (length 2n) plus covariance matrix (2n x 2n)
/// in shot-noise units.  Value type; all operations return new states.
class GaussianState {
public:
    /// n-mode vacuum: zero mean, identity covariance.
    static GaussianState vacuum(int n_modes);

    /// Product of coherent states with the given amplitudes.
    static GaussianState coherent(const std::vector<std::complex<double>>& amplitudes);

    /// Build from explicit moments; validates symmetry, finiteness and
    /// physicality (throws std::invalid_argument on failure).
    static GaussianState from_mean_cov(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    /// Build without any validation.  For internal use and for tests that
    /// need deliberately unphysical matrices.
    static GaussianState from_raw(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    int n_modes() const { return static_cast<int>(mean_.size()) / 2; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    double quad_mean(int mode, Quadrature q) const;
    double quad_var(int mode, Quadrature q) const;

    /// 2-vector / 2x2 block of one mode (marginal moments).
    Eigen::Vector2d mode_mean(int mode) const;
    Eigen::Matrix2d mode_cov(int mode) const;

    /// Symplectic spectrum of the covariance (all values >= 1 for a
    /// physical state; a pure state has them all equal to 1).
    std::vector<double> symplectic_eigenvalues() const;
    double min_symplectic_eigenvalue() const;

    /// True when the covariance is symmetric and its symplectic
    /// eigenvalues are all >= 1 - tol.
    bool is_physical(double tol = kPhysicalityTol) const;

    /// Throws corrupt_state_error when !is_physical(tol).
    void require_physical(double tol = kPhysicalityTol) const;

private:
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
        : mean_(std::move(mean)), cov_(std::move(cov)) {}

    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// A symplectic matrix acting on a fixed number of modes.  Construction
/// checks S * Omega * S^T = Omega to kSymplecticTol and throws
/// std::invalid_argument otherwise.
class SymplecticOp {
public:
    explicit SymplecticOp(Eigen::MatrixXd matrix);

    /// x' = x cos - p sin, p' = x sin + p cos.
    static SymplecticOp rotation(double theta);

    /// diag(e^{-r}, e^{+r}) conjugated by rotation(angle).
    static SymplecticOp squeezer(double r, double angle = 0.0);

    /// Two-mode mixer; see the convention note at the top of this header.
    static SymplecticOp beam_splitter(double transmittance, double relative_phase = 0.0);

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int n_modes() const { return static_cast<int>(matrix_.rows()) / 2; }

    /// Apply to the given modes of `state` (identity elsewhere).
    GaussianState apply(const GaussianState& state, const std::vector<int>& modes) const;

private:
    Eigen::MatrixXd matrix_;
};

// ---- One- and two-mode circuit operations (value semantics) ----

GaussianState phase_shift(const GaussianState& state, int mode, double theta);
GaussianState squeeze(const GaussianState& state, int mode, double r, double angle = 0.0);
GaussianState beam_splitter(const GaussianState& state, int mode_i, int mode_j,
                            double transmittance, double relative_phase = 0.0);

/// Pure-loss channel with transmission eta in [0, 1]:
/// cov block -> eta * cov + (1 - eta) * I, mean -> sqrt(eta) * mean.
GaussianState loss(const GaussianState& state, int mode, double eta);

/// Shift one mode's mean by (dx, dp).
GaussianState displace(const GaussianState& state, int mode, double dx, double dp);

/// Deterministic average over a phase-lock error of RMS size theta_rms
/// (radians), approximated by the symmetric two-point mixture of rotations
/// by +theta_rms and -theta_rms.  This matches a Gaussian average over the
/// lock error to fourth order in theta_rms and keeps the map Gaussian.
GaussianState phase_jitter_mix(const GaussianState& state, int mode, double theta_rms);

/// Tensor product: modes of `b` are appended after those of `a`.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

/// Drop one mode (marginalise over it).
GaussianState remove_mode(const GaussianState& state, int mode);

// ---- Homodyne measurement ----

struct HomodyneOutcome {
    double value = 0.0;
    Quadrature quadrature = Quadrature::X;
    int mode = 0;
};

/// Conditional state after observing quadrature q of `mode` at `outcome`:
/// the usual Gaussian conditioning (Schur complement) on the remaining
/// modes; the measured mode is removed.  Throws corrupt_state_error if the
/// measured variance is not strictly positive.
GaussianState condition_on(const GaussianState& state, int mode, Quadrature q, double outcome);

/// Sample a homodyne outcome from the marginal of quadrature q and return
/// it together with the conditional state of the remaining modes.
std::pair<HomodyneOutcome, GaussianState> homodyne(const GaussianState& state, int mode,
                                                   Quadrature q, std::mt19937_64& rng);

}  // namespace cvqt
