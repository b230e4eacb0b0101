#include "cvqt/gaussian.hpp"

#include "cvqt/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace cvqt {

namespace {

void check_mode(const GaussianState& state, int mode, const char* where) {
    if (mode < 0 || mode >= state.n_modes()) {
        std::ostringstream msg;
        msg << where << ": mode " << mode << " out of range (state has "
            << state.n_modes() << " modes)";
        throw std::invalid_argument(msg.str());
    }
}

void check_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

/// Embed a 2k x 2k matrix acting on `modes` into the full 2n x 2n space.
Eigen::MatrixXd embed(const Eigen::MatrixXd& block, const std::vector<int>& modes, int n_modes) {
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const int k = static_cast<int>(modes.size());
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            full.block<2, 2>(2 * modes[a], 2 * modes[b]) = block.block<2, 2>(2 * a, 2 * b);
        }
    }
    return full;
}

Eigen::Matrix2d rotation_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

GaussianState apply_full(const GaussianState& state, const Eigen::MatrixXd& s_full) {
    Eigen::VectorXd mean = s_full * state.mean();
    Eigen::MatrixXd cov = s_full * state.cov() * s_full.transpose();
    cov = ((cov + cov.transpose()) / 2.0).eval();  // keep exactly symmetric
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

double draw_std_normal(std::mt19937_64& rng) {
    return std::normal_distribution<double>{}(rng);
}

// ---- GaussianState ----

GaussianState GaussianState::vacuum(int n_modes) {
    if (n_modes <= 0) {
        throw std::invalid_argument("vacuum: need at least one mode");
    }
    return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                         Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState GaussianState::coherent(const std::vector<std::complex<double>>& amplitudes) {
    const int n = static_cast<int>(amplitudes.size());
    GaussianState state = vacuum(n);
    for (int m = 0; m < n; ++m) {
        check_finite(amplitudes[m].real(), "coherent: amplitude");
        check_finite(amplitudes[m].imag(), "coherent: amplitude");
        state.mean_(2 * m) = kCoherentMeanScale * amplitudes[m].real();
        state.mean_(2 * m + 1) = kCoherentMeanScale * amplitudes[m].imag();
    }
    return state;
}

GaussianState GaussianState::from_mean_cov(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    if (mean.size() == 0 || mean.size() % 2 != 0) {
        throw std::invalid_argument("from_mean_cov: mean length must be a positive even number");
    }
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw std::invalid_argument("from_mean_cov: covariance shape does not match mean length");
    }
    if (!mean.allFinite() || !cov.allFinite()) {
        throw std::invalid_argument("from_mean_cov: moments must be finite");
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw std::invalid_argument("from_mean_cov: covariance is not symmetric");
    }
    GaussianState state(std::move(mean), std::move(cov));
    if (!state.is_physical()) {
        throw std::invalid_argument(
            "from_mean_cov: covariance violates the uncertainty bound "
            "(symplectic eigenvalue below 1)");
    }
    return state;
}

GaussianState GaussianState::from_raw(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    return GaussianState(std::move(mean), std::move(cov));
}

double GaussianState::quad_mean(int mode, Quadrature q) const {
    check_mode(*this, mode, "quad_mean");
    return mean_(quad_index(mode, q));
}

double GaussianState::quad_var(int mode, Quadrature q) const {
    check_mode(*this, mode, "quad_var");
    const int i = quad_index(mode, q);
    return cov_(i, i);
}

Eigen::Vector2d GaussianState::mode_mean(int mode) const {
    check_mode(*this, mode, "mode_mean");
    return mean_.segment<2>(2 * mode);
}

Eigen::Matrix2d GaussianState::mode_cov(int mode) const {
    check_mode(*this, mode, "mode_cov");
    return cov_.block<2, 2>(2 * mode, 2 * mode);
}

std::vector<double> GaussianState::symplectic_eigenvalues() const {
    const int n = n_modes();
    // Eigenvalues of |i Omega cov| come in pairs; compute them through the
    // symmetric product sqrt(cov) * Omega * sqrt(cov), whose singular
    // values are the symplectic eigenvalues, each repeated twice.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((cov_ + cov_.transpose()) / 2.0);
    const Eigen::VectorXd& evals = es.eigenvalues();
    if (evals.minCoeff() <= 0.0) {
        // Covariance is not positive definite: report the offending
        // eigenvalue itself, which is guaranteed to flunk any >= 1 check.
        std::vector<double> out(static_cast<size_t>(n), evals.minCoeff());
        return out;
    }
    Eigen::MatrixXd sqrt_cov =
        es.eigenvectors() * evals.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd k = sqrt_cov * symplectic_form(n) * sqrt_cov;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
    Eigen::VectorXd sv = svd.singularValues();  // sorted descending, pairs
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
        out.push_back((sv(2 * m) + sv(2 * m + 1)) / 2.0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double GaussianState::min_symplectic_eigenvalue() const {
    std::vector<double> nu = symplectic_eigenvalues();
    return *std::min_element(nu.begin(), nu.end());
}

bool GaussianState::is_physical(double tol) const {
    if (!mean_.allFinite() || !cov_.allFinite()) {
        return false;
    }
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        return false;
    }
    return min_symplectic_eigenvalue() >= 1.0 - tol;
}

void GaussianState::require_physical(double tol) const {
    if (!is_physical(tol)) {
        std::ostringstream msg;
        msg << "state became unphysical (min symplectic eigenvalue "
            << min_symplectic_eigenvalue() << ")";
        throw corrupt_state_error(msg.str());
    }
}

// ---- SymplecticOp ----

SymplecticOp::SymplecticOp(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0) {
        throw std::invalid_argument("SymplecticOp: matrix must be square with even dimension");
    }
    if (!matrix_.allFinite()) {
        throw std::invalid_argument("SymplecticOp: matrix must be finite");
    }
    const int n = static_cast<int>(matrix_.rows()) / 2;
    Eigen::MatrixXd omega = symplectic_form(n);
    const double defect =
        (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
    if (defect > kSymplecticTol) {
        std::ostringstream msg;
        msg << "SymplecticOp: matrix is not symplectic (defect " << defect << ")";
        throw std::invalid_argument(msg.str());
    }
}

SymplecticOp SymplecticOp::rotation(double theta) {
    check_finite(theta, "rotation: theta");
    return SymplecticOp(rotation_matrix(theta));
}

SymplecticOp SymplecticOp::squeezer(double r, double angle) {
    check_finite(r, "squeezer: r");
    check_finite(angle, "squeezer: angle");
    Eigen::Matrix2d core = Eigen::Matrix2d::Zero();
    core(0, 0) = std::exp(-r);
    core(1, 1) = std::exp(r);
    Eigen::Matrix2d m = rotation_matrix(angle) * core * rotation_matrix(-angle);
    return SymplecticOp(m);
}

SymplecticOp SymplecticOp::beam_splitter(double transmittance, double relative_phase) {
    check_finite(relative_phase, "beam_splitter: relative_phase");
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
        throw std::invalid_argument("beam_splitter: transmittance must be in [0, 1]");
    }
    const double t = std::sqrt(transmittance);
    const double u = std::sqrt(1.0 - transmittance);
    const Eigen::Matrix2d rot = rotation_matrix(relative_phase);
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = t * Eigen::Matrix2d::Identity();
    m.block<2, 2>(0, 2) = u * rot;
    m.block<2, 2>(2, 0) = -u * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 2) = t * rot;
    return SymplecticOp(m);
}

GaussianState SymplecticOp::apply(const GaussianState& state, const std::vector<int>& modes) const {
    if (static_cast<int>(modes.size()) != n_modes()) {
        throw std::invalid_argument("SymplecticOp::apply: wrong number of target modes");
    }
    for (size_t a = 0; a < modes.size(); ++a) {
        check_mode(state, modes[a], "SymplecticOp::apply");
        for (size_t b = a + 1; b < modes.size(); ++b) {
            if (modes[a] == modes[b]) {
                throw std::invalid_argument("SymplecticOp::apply: duplicate target mode");
            }
        }
    }
    return apply_full(state, embed(matrix_, modes, state.n_modes()));
}

// ---- Circuit operations ----

GaussianState phase_shift(const GaussianState& state, int mode, double theta) {
    check_mode(state, mode, "phase_shift");
    return SymplecticOp::rotation(theta).apply(state, {mode});
}

GaussianState squeeze(const GaussianState& state, int mode, double r, double angle) {
    check_mode(state, mode, "squeeze");
    return SymplecticOp::squeezer(r, angle).apply(state, {mode});
}

GaussianState beam_splitter(const GaussianState& state, int mode_i, int mode_j,
                            double transmittance, double relative_phase) {
    check_mode(state, mode_i, "beam_splitter");
    check_mode(state, mode_j, "beam_splitter");
    if (mode_i == mode_j) {
        throw std::invalid_argument("beam_splitter: modes must differ");
    }
    return SymplecticOp::beam_splitter(transmittance, relative_phase)
        .apply(state, {mode_i, mode_j});
}

GaussianState loss(const GaussianState& state, int mode, double eta) {
    check_mode(state, mode, "loss");
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("loss: eta must be in [0, 1]");
    }
    const int n = state.n_modes();
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double root_eta = std::sqrt(eta);
    x(2 * mode, 2 * mode) = root_eta;
    x(2 * mode + 1, 2 * mode + 1) = root_eta;
    Eigen::VectorXd mean = x * state.mean();
    Eigen::MatrixXd cov = x * state.cov() * x.transpose();
    cov(2 * mode, 2 * mode) += 1.0 - eta;
    cov(2 * mode + 1, 2 * mode + 1) += 1.0 - eta;
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

GaussianState displace(const GaussianState& state, int mode, double dx, double dp) {
    check_mode(state, mode, "displace");
    check_finite(dx, "displace: dx");
    check_finite(dp, "displace: dp");
    Eigen::VectorXd mean = state.mean();
    mean(2 * mode) += dx;
    mean(2 * mode + 1) += dp;
    return GaussianState::from_raw(std::move(mean), state.cov());
}

GaussianState phase_jitter_mix(const GaussianState& state, int mode, double theta_rms) {
    check_mode(state, mode, "phase_jitter_mix");
    if (!(theta_rms >= 0.0) || !std::isfinite(theta_rms)) {
        throw std::invalid_argument("phase_jitter_mix: theta_rms must be finite and >= 0");
    }
    if (theta_rms == 0.0) {
        return state;
    }
    const GaussianState plus = phase_shift(state, mode, theta_rms);
    const GaussianState minus = phase_shift(state, mode, -theta_rms);
    Eigen::VectorXd mean = (plus.mean() + minus.mean()) / 2.0;
    Eigen::VectorXd dplus = plus.mean() - mean;
    Eigen::VectorXd dminus = minus.mean() - mean;
    Eigen::MatrixXd cov = (plus.cov() + minus.cov()) / 2.0 +
                          (dplus * dplus.transpose() + dminus * dminus.transpose()) / 2.0;
    cov = ((cov + cov.transpose()) / 2.0).eval();
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const int da = static_cast<int>(a.mean().size());
    const int db = static_cast<int>(b.mean().size());
    Eigen::VectorXd mean(da + db);
    mean << a.mean(), b.mean();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(da + db, da + db);
    cov.topLeftCorner(da, da) = a.cov();
    cov.bottomRightCorner(db, db) = b.cov();
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

GaussianState remove_mode(const GaussianState& state, int mode) {
    check_mode(state, mode, "remove_mode");
    const int n = state.n_modes();
    if (n == 1) {
        throw std::invalid_argument("remove_mode: cannot remove the last mode");
    }
    std::vector<int> keep;
    keep.reserve(2 * (static_cast<size_t>(n) - 1));
    for (int i = 0; i < 2 * n; ++i) {
        if (i / 2 != mode) {
            keep.push_back(i);
        }
    }
    const int d = static_cast<int>(keep.size());
    Eigen::VectorXd mean(d);
    Eigen::MatrixXd cov(d, d);
    for (int a = 0; a < d; ++a) {
        mean(a) = state.mean()(keep[a]);
        for (int b = 0; b < d; ++b) {
            cov(a, b) = state.cov()(keep[a], keep[b]);
        }
    }
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

// ---- Homodyne ----

GaussianState condition_on(const GaussianState& state, int mode, Quadrature q, double outcome) {
    check_mode(state, mode, "condition_on");
    check_finite(outcome, "condition_on: outcome");
    const int n = state.n_modes();
    if (n == 1) {
        throw std::invalid_argument("condition_on: measuring the only mode leaves no state");
    }
    const int iq = quad_index(mode, q);
    const double var_q = state.cov()(iq, iq);
    if (!(var_q > 0.0) || !std::isfinite(var_q)) {
        std::ostringstream msg;
        msg << "homodyne target quadrature has non-positive variance " << var_q;
        throw corrupt_state_error(msg.str());
    }
    // Indices of the surviving quadratures (both quadratures of `mode` go).
    std::vector<int> keep;
    keep.reserve(2 * (static_cast<size_t>(n) - 1));
    for (int i = 0; i < 2 * n; ++i) {
        if (i / 2 != mode) {
            keep.push_back(i);
        }
    }
    const int d = static_cast<int>(keep.size());
    Eigen::VectorXd cross(d);
    Eigen::VectorXd mean(d);
    Eigen::MatrixXd cov(d, d);
    for (int a = 0; a < d; ++a) {
        cross(a) = state.cov()(keep[a], iq);
        mean(a) = state.mean()(keep[a]);
        for (int b = 0; b < d; ++b) {
            cov(a, b) = state.cov()(keep[a], keep[b]);
        }
    }
    mean += cross * ((outcome - state.mean()(iq)) / var_q);
    cov -= (cross * cross.transpose()) / var_q;
    cov = ((cov + cov.transpose()) / 2.0).eval();
    return GaussianState::from_raw(std::move(mean), std::move(cov));
}

std::pair<HomodyneOutcome, GaussianState> homodyne(const GaussianState& state, int mode,
                                                   Quadrature q, std::mt19937_64& rng) {
    check_mode(state, mode, "homodyne");
    const int iq = quad_index(mode, q);
    const double var_q = state.cov()(iq, iq);
    if (!(var_q > 0.0) || !std::isfinite(var_q)) {
        std::ostringstream msg;
        msg << "homodyne target quadrature has non-positive variance " << var_q;
        throw corrupt_state_error(msg.str());
    }
    const double value = state.mean()(iq) + std::sqrt(var_q) * draw_std_normal(rng);
    HomodyneOutcome outcome{value, q, mode};
    return {outcome, condition_on(state, mode, q, value)};
}

}  // namespace cvqt
