#include "cvqt/teleporter.hpp"

#include "cvqt/calibration.hpp"
#include "cvqt/errors.hpp"
#include "cvqt/metrics.hpp"
#include "engine_internal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

void require_range(double value, double lo, double hi, const char* name) {
    if (!(std::isfinite(value) && value >= lo && value <= hi)) {
        std::ostringstream msg;
        msg << name << " must be in [" << lo << ", " << hi << "], got " << value;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

// ---- Config validation and resolution ----

void SqueezerSpec::validate() const {
    switch (kind) {
        case SqueezerKind::DirectR:
            require_range(r, 0.0, 15.0, "squeezer r");
            return;
        case SqueezerKind::SqueezingDb:
            require_range(squeezing_db, -130.0, 0.0, "squeezer squeezing_db");
            return;
        case SqueezerKind::Opo:
            opo.validate();
            return;
    }
    throw std::invalid_argument("squeezer kind is invalid");
}

SqueezeLevels SqueezerSpec::levels() const {
    validate();
    switch (kind) {
        case SqueezerKind::DirectR:
            return SqueezeLevels{std::exp(-2.0 * r), std::exp(2.0 * r)};
        case SqueezerKind::SqueezingDb: {
            const double s = from_db(squeezing_db);
            return SqueezeLevels{s, 1.0 / s};
        }
        case SqueezerKind::Opo:
            return jitter_average(squeezing_spectrum(opo), opo.jitter_rms_deg);
    }
    throw std::invalid_argument("squeezer kind is invalid");
}

void TeleporterConfig::validate() const {
    squeezer_a.validate();
    squeezer_b.validate();
    require_range(gain_x, 0.0, 16.0, "gain_x");
    require_range(gain_p, 0.0, 16.0, "gain_p");
    require_range(eta.path_a, 0.0, 1.0, "eta.path_a");
    require_range(eta.path_b, 0.0, 1.0, "eta.path_b");
    require_range(eta.alice_x, 0.0, 1.0, "eta.alice_x");
    require_range(eta.alice_p, 0.0, 1.0, "eta.alice_p");
    require_range(eta.victor, 0.0, 1.0, "eta.victor");
    // Alice's gains are compensated by 1/sqrt(eta); a dead detector cannot
    // be compensated.
    require(eta.alice_x > 0.0, "eta.alice_x must be > 0");
    require(eta.alice_p > 0.0, "eta.alice_p must be > 0");
    require_range(jitter.squeezer_a_deg, 0.0, 89.0, "jitter_deg.squeezer_a");
    require_range(jitter.squeezer_b_deg, 0.0, 89.0, "jitter_deg.squeezer_b");
    require_range(jitter.epr_hbs_deg, 0.0, 89.0, "jitter_deg.epr_hbs");
    require_range(jitter.alice_hbs_deg, 0.0, 89.0, "jitter_deg.alice_hbs");
    require_range(jitter.victor_lo_deg, 0.0, 89.0, "jitter_deg.victor_lo");
    require_range(input.mean_x, -1e6, 1e6, "input.mean_x");
    require_range(input.mean_p, -1e6, 1e6, "input.mean_p");
    require_range(probe_tone, 0.0, 1e6, "probe_tone");
    require_range(gain_step_db, 0.0, 10.0, "gain_step_db");
    require(shots >= 1, "shots must be >= 1");
    if (engine == Engine::MonteCarlo) {
        // Moment estimates need at least two shots per verification
        // quadrature; shots alternate between X and P.
        require(shots >= 4, "shots must be >= 4 for the monte_carlo engine");
    }
    require(workers >= 1 && workers <= 4096, "workers must be in [1, 4096]");
}

namespace detail {

ResolvedConfig resolve(const TeleporterConfig& config) {
    config.validate();
    ResolvedConfig rc;
    rc.lv_a = config.squeezer_a.levels();
    rc.lv_b = config.squeezer_b.levels();
    double gx = config.gain_x;
    double gp = config.gain_p;
    if (config.gain_step_db > 0.0) {
        gx = quantize_gain(gx, config.gain_step_db);
        gp = quantize_gain(gp, config.gain_step_db);
    }
    rc.gain_x = gx;
    rc.gain_p = gp;
    rc.cx = std::sqrt(2.0) * gx / std::sqrt(config.eta.alice_x);
    rc.cp = std::sqrt(2.0) * gp / std::sqrt(config.eta.alice_p);
    rc.eta = config.eta;
    rc.j_sa = deg_to_rad(config.jitter.squeezer_a_deg);
    rc.j_sb = deg_to_rad(config.jitter.squeezer_b_deg);
    rc.j_epr = deg_to_rad(config.jitter.epr_hbs_deg);
    rc.j_alice = deg_to_rad(config.jitter.alice_hbs_deg);
    rc.j_victor = deg_to_rad(config.jitter.victor_lo_deg);
    rc.any_shot_jitter = rc.j_sa > 0.0 || rc.j_sb > 0.0 || rc.j_epr > 0.0 ||
                         rc.j_alice > 0.0 || rc.j_victor > 0.0;
    rc.input_mean << config.input.mean_x, config.input.mean_p;
    rc.probe_tone = config.probe_tone;
    return rc;
}

GaussianState input_state(const ResolvedConfig& rc) {
    Eigen::VectorXd mean(2);
    mean << rc.input_mean(0), rc.input_mean(1);
    return GaussianState::from_raw(std::move(mean), Eigen::MatrixXd::Identity(2, 2));
}

namespace {

/// Squeezer output: x-squeezed to `levels`, phase-quadrature probe tone.
GaussianState arm_state(const SqueezeLevels& levels, double probe_tone) {
    Eigen::VectorXd mean(2);
    mean << 0.0, probe_tone;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = levels.squeezed;
    cov(1, 1) = levels.antisqueezed;
    return GaussianState::from_mean_cov(std::move(mean), std::move(cov));
}

}  // namespace

GaussianState premeasurement_state(const ResolvedConfig& rc, const GaussianState& input,
                                   const LockAngles* sampled, StateAudit* audit) {
    auto note = [&](const char* name, const GaussianState& s) {
        if (audit != nullptr) {
            audit->states.emplace_back(name, s);
        }
    };
    // Lock jitter: a definite sampled rotation per shot (Monte Carlo) or
    // the deterministic two-point mixture (moment propagation).
    auto lock = [&](GaussianState s, int mode, double rms, double angle, const char* name) {
        if (sampled != nullptr) {
            if (angle == 0.0) {
                return s;
            }
            s = phase_shift(s, mode, angle);
        } else {
            if (rms == 0.0) {
                return s;
            }
            s = phase_jitter_mix(s, mode, rms);
        }
        note(name, s);
        return s;
    };

    GaussianState st = tensor(tensor(input, arm_state(rc.lv_a, rc.probe_tone)),
                              arm_state(rc.lv_b, rc.probe_tone));
    note("initial", st);
    st = lock(std::move(st), 1, rc.j_sa, sampled ? sampled->sa : 0.0, "lock-squeezer-a");
    st = lock(std::move(st), 2, rc.j_sb, sampled ? sampled->sb : 0.0, "lock-squeezer-b");
    st = phase_shift(st, 2, kPi / 2.0);
    note("epr-phase", st);
    st = lock(std::move(st), 2, rc.j_epr, sampled ? sampled->epr : 0.0, "lock-epr-hbs");
    st = beam_splitter(st, 1, 2, 0.5);
    note("epr-split", st);
    if (rc.eta.path_a < 1.0) {
        st = loss(st, 1, rc.eta.path_a);
        note("loss-path-a", st);
    }
    if (rc.eta.path_b < 1.0) {
        st = loss(st, 2, rc.eta.path_b);
        note("loss-path-b", st);
    }
    st = lock(std::move(st), 1, rc.j_alice, sampled ? sampled->alice : 0.0, "lock-alice-hbs");
    // After this mixer: mode 0 = Alice's x port, mode 1 = Alice's p port.
    st = beam_splitter(st, 1, 0, 0.5);
    note("alice-split", st);
    if (rc.eta.alice_x < 1.0) {
        st = loss(st, 0, rc.eta.alice_x);
        note("loss-alice-x", st);
    }
    if (rc.eta.alice_p < 1.0) {
        st = loss(st, 1, rc.eta.alice_p);
        note("loss-alice-p", st);
    }
    note("premeasurement", st);
    return st;
}

ShotRecord simulate_shot_circuit(const ResolvedConfig& rc, const GaussianState& input,
                                 bool victor_x, std::mt19937_64& rng) {
    LockAngles angles;
    if (rc.j_sa > 0.0) {
        angles.sa = rc.j_sa * draw_std_normal(rng);
    }
    if (rc.j_sb > 0.0) {
        angles.sb = rc.j_sb * draw_std_normal(rng);
    }
    if (rc.j_epr > 0.0) {
        angles.epr = rc.j_epr * draw_std_normal(rng);
    }
    if (rc.j_alice > 0.0) {
        angles.alice = rc.j_alice * draw_std_normal(rng);
    }
    const GaussianState pre = premeasurement_state(rc, input, &angles, nullptr);

    auto [out_x, after_x] = homodyne(pre, 0, Quadrature::X, rng);
    auto [out_p, after_p] = homodyne(after_x, 0, Quadrature::P, rng);

    ShotRecord rec;
    rec.x_u = out_x.value;
    rec.p_v = out_p.value;
    rec.dx = rc.cx * out_x.value;
    rec.dp = rc.cp * out_p.value;

    GaussianState bob = displace(after_p, 0, rec.dx, rec.dp);
    if (rc.j_victor > 0.0) {
        const double theta = rc.j_victor * draw_std_normal(rng);
        bob = phase_shift(bob, 0, theta);
    }
    if (rc.eta.victor < 1.0) {
        bob = loss(bob, 0, rc.eta.victor);
    }
    const Quadrature q = victor_x ? Quadrature::X : Quadrature::P;
    const double var_q = bob.quad_var(0, q);
    if (!(var_q > 0.0) || !std::isfinite(var_q)) {
        throw corrupt_state_error("verification quadrature has non-positive variance");
    }
    rec.victor_quad = q;
    rec.victor_value = bob.quad_mean(0, q) + std::sqrt(var_q) * draw_std_normal(rng);
    return rec;
}

std::vector<std::pair<long, long>> partition_shots(long shots, int workers) {
    require(shots >= 0, "partition_shots: shots must be >= 0");
    require(workers >= 1, "partition_shots: workers must be >= 1");
    std::vector<std::pair<long, long>> parts(static_cast<size_t>(workers));
    const long base = shots / workers;
    const long rem = shots % workers;
    long start = 0;
    for (int w = 0; w < workers; ++w) {
        const long count = base + (w < rem ? 1 : 0);
        parts[static_cast<size_t>(w)] = {start, count};
        start += count;
    }
    return parts;
}

std::mt19937_64 worker_rng(std::uint64_t seed, int worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(worker), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

void MomentAccumulator::add(const ShotRecord& rec) {
    if (rec.victor_quad == Quadrature::X) {
        ++n_x;
        sum_x += rec.victor_value;
        sumsq_x += rec.victor_value * rec.victor_value;
    } else {
        ++n_p;
        sum_p += rec.victor_value;
        sumsq_p += rec.victor_value * rec.victor_value;
    }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    n_x += other.n_x;
    n_p += other.n_p;
    sum_x += other.sum_x;
    sumsq_x += other.sumsq_x;
    sum_p += other.sum_p;
    sumsq_p += other.sumsq_p;
}

void finish_report(TeleportReport& report, const Eigen::Matrix2d& cov,
                   const Eigen::Vector2d& mean, const Eigen::Vector2d& reference_mean) {
    report.sigma_x = cov(0, 0);
    report.sigma_p = cov(1, 1);
    report.sigma_x_db = to_db(report.sigma_x);
    report.sigma_p_db = to_db(report.sigma_p);
    report.mean_x = mean(0);
    report.mean_p = mean(1);
    double f = fidelity_gaussian(cov, mean - reference_mean);
    if (f > 1.0) {
        // Sampled moments can graze past the physical maximum.
        f = 1.0;
    }
    report.fidelity = f;
    // The capacity diagnostics need fidelity strictly inside (0, 1); a large
    // mean offset (for example an uncancelled probe tone) can underflow the
    // overlap to exactly zero, so clamp both ends before converting.
    const SequentialCapacity cap = sequential_capacity(std::clamp(f, 1e-12, 1.0 - 1e-12));
    report.n_s = cap.n_s;
    report.r_eff = cap.r_eff;
}

TeleportReport report_from_moments(const ResolvedConfig& rc, const TeleporterConfig& config,
                                   const MomentAccumulator& acc) {
    require(acc.n_x >= 2 && acc.n_p >= 2,
            "Monte Carlo needs at least two shots per verification quadrature");
    const double nx = static_cast<double>(acc.n_x);
    const double np = static_cast<double>(acc.n_p);
    const double mean_x = acc.sum_x / nx;
    const double mean_p = acc.sum_p / np;
    const double var_x = (acc.sumsq_x - nx * mean_x * mean_x) / (nx - 1.0);
    const double var_p = (acc.sumsq_p - np * mean_p * mean_p) / (np - 1.0);
    if (!(var_x > 0.0) || !(var_p > 0.0)) {
        throw corrupt_state_error("sampled verification variance is not positive");
    }

    TeleportReport report;
    report.engine = Engine::MonteCarlo;
    report.shots = config.shots;
    report.seed = config.seed;
    report.workers = config.workers;

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    cov(0, 0) = var_x;
    cov(1, 1) = var_p;
    finish_report(report, cov, Eigen::Vector2d(mean_x, mean_p), rc.input_mean);

    report.se_sigma_x = var_x * std::sqrt(2.0 / (nx - 1.0));
    report.se_sigma_p = var_p * std::sqrt(2.0 / (np - 1.0));
    // First-order error propagation through the fidelity formula.
    const double f = report.fidelity;
    const double dx = mean_x - rc.input_mean(0);
    const double dp = mean_p - rc.input_mean(1);
    const double d_sx = f / (2.0 * (1.0 + var_x)) * report.se_sigma_x;
    const double d_sp = f / (2.0 * (1.0 + var_p)) * report.se_sigma_p;
    const double d_mx = f * std::abs(dx) / (1.0 + var_x) * std::sqrt(var_x / nx);
    const double d_mp = f * std::abs(dp) / (1.0 + var_p) * std::sqrt(var_p / np);
    report.se_fidelity = std::sqrt(d_sx * d_sx + d_sp * d_sp + d_mx * d_mx + d_mp * d_mp);
    return report;
}

}  // namespace detail

// ---- EPR preparation ----

GaussianState build_epr(double r_a, double r_b, const EprImperfections& imp) {
    require_range(r_a, 0.0, 15.0, "build_epr r_a");
    require_range(r_b, 0.0, 15.0, "build_epr r_b");
    require_range(imp.eta_a, 0.0, 1.0, "build_epr eta_a");
    require_range(imp.eta_b, 0.0, 1.0, "build_epr eta_b");
    require_range(imp.jitter_a_deg, 0.0, 89.0, "build_epr jitter_a_deg");
    require_range(imp.jitter_b_deg, 0.0, 89.0, "build_epr jitter_b_deg");
    require_range(imp.jitter_hbs_deg, 0.0, 89.0, "build_epr jitter_hbs_deg");

    GaussianState st = tensor(squeeze(GaussianState::vacuum(1), 0, r_a),
                              squeeze(GaussianState::vacuum(1), 0, r_b));
    if (imp.jitter_a_deg > 0.0) {
        st = phase_jitter_mix(st, 0, detail::deg_to_rad(imp.jitter_a_deg));
    }
    if (imp.jitter_b_deg > 0.0) {
        st = phase_jitter_mix(st, 1, detail::deg_to_rad(imp.jitter_b_deg));
    }
    st = phase_shift(st, 1, detail::kPi / 2.0);
    if (imp.jitter_hbs_deg > 0.0) {
        st = phase_jitter_mix(st, 1, detail::deg_to_rad(imp.jitter_hbs_deg));
    }
    st = beam_splitter(st, 0, 1, 0.5);
    if (imp.eta_a < 1.0) {
        st = loss(st, 0, imp.eta_a);
    }
    if (imp.eta_b < 1.0) {
        st = loss(st, 1, imp.eta_b);
    }
    return st;
}

// ---- Deterministic engine ----

HeisenbergRun run_heisenberg_state(const TeleporterConfig& config, const GaussianState& input,
                                   const Eigen::Vector2d& reference_mean, StateAudit* audit) {
    const detail::ResolvedConfig rc = detail::resolve(config);
    if (input.n_modes() != 1) {
        throw std::invalid_argument("teleporter input must be a single mode");
    }
    if (!input.is_physical()) {
        throw std::invalid_argument("teleporter input state is unphysical");
    }
    auto note = [&](const char* name, const GaussianState& s) {
        if (audit != nullptr) {
            audit->states.emplace_back(name, s);
        }
    };

    const GaussianState pre = detail::premeasurement_state(rc, input, nullptr, audit);

    // Feedforward as an explicit linear functional of the premeasurement
    // quadratures: x_out = x_Bob + cx * x_u, p_out = p_Bob + cp * p_v.
    // (Displacing by Alice's outcomes leaves exactly these combinations.)
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2, 6);
    l(0, 4) = 1.0;
    l(0, 0) = rc.cx;
    l(1, 5) = 1.0;
    l(1, 3) = rc.cp;
    Eigen::VectorXd out_mean = l * pre.mean();
    Eigen::MatrixXd out_cov = l * pre.cov() * l.transpose();
    out_cov = ((out_cov + out_cov.transpose()) / 2.0).eval();
    GaussianState bob = GaussianState::from_raw(out_mean, out_cov);
    note("feedforward", bob);

    GaussianState vic = bob;
    if (rc.j_victor > 0.0) {
        vic = phase_jitter_mix(vic, 0, rc.j_victor);
        note("lock-victor-lo", vic);
    }
    if (rc.eta.victor < 1.0) {
        vic = loss(vic, 0, rc.eta.victor);
        note("loss-victor", vic);
    }

    TeleportReport report;
    report.engine = Engine::Heisenberg;
    report.shots = 0;
    report.seed = config.seed;
    report.workers = 1;
    detail::finish_report(report, vic.mode_cov(0), vic.mode_mean(0), reference_mean);
    return HeisenbergRun{report, std::move(bob), std::move(vic)};
}

TeleportReport run_heisenberg(const TeleporterConfig& config, StateAudit* audit) {
    const detail::ResolvedConfig rc = detail::resolve(config);
    return run_heisenberg_state(config, detail::input_state(rc), rc.input_mean, audit).report;
}

// ---- Monte Carlo production engine ----

namespace {

/// Precomputed per-shot recursion for the jitter-free case: conditional
/// means are linear in the two measurement outcomes and all variances are
/// shot-independent, so each shot is a handful of scalar operations.
struct FastPath {
    double mu_u = 0.0;
    double sd_u = 0.0;
    double k_v = 0.0;   ///< response of p_v's mean to (x_u - mu_u)
    double mu_v = 0.0;
    double sd_v = 0.0;  ///< conditional spread of p_v
    Eigen::Vector2d mu_b = Eigen::Vector2d::Zero();
    Eigen::Vector2d g1_b = Eigen::Vector2d::Zero();  ///< Bob mean response to (x_u - mu_u)
    Eigen::Vector2d g2_b = Eigen::Vector2d::Zero();  ///< ... and to the p_v surprise
    double cx = 0.0;
    double cp = 0.0;
    double sqrt_eta_v = 1.0;
    double sd_vx = 0.0;  ///< verification spreads (victor loss folded in)
    double sd_vp = 0.0;
};

FastPath make_fast_path(const detail::ResolvedConfig& rc, const GaussianState& pre) {
    const Eigen::MatrixXd& s = pre.cov();
    const Eigen::VectorXd& mu = pre.mean();
    FastPath fp;
    const double s_u = s(0, 0);
    if (!(s_u > 0.0)) {
        throw corrupt_state_error("Alice's x quadrature has non-positive variance");
    }
    fp.mu_u = mu(0);
    fp.sd_u = std::sqrt(s_u);
    // Condition on x_u (index 0); the measured mode (indices 0, 1) drops out.
    Eigen::Vector4d cross_u;
    for (int a = 0; a < 4; ++a) {
        cross_u(a) = s(2 + a, 0);
    }
    const Eigen::Vector4d g1 = cross_u / s_u;
    Eigen::Matrix4d s1;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            s1(a, b) = s(2 + a, 2 + b) - cross_u(a) * cross_u(b) / s_u;
        }
    }
    fp.mu_v = mu(3);
    fp.k_v = g1(1);
    const double s_v = s1(1, 1);
    if (!(s_v > 0.0)) {
        throw corrupt_state_error("Alice's p quadrature has non-positive variance");
    }
    fp.sd_v = std::sqrt(s_v);
    // Condition on p_v (local index 1 of the remaining (v, Bob) block).
    const Eigen::Vector2d cross_v(s1(2, 1), s1(3, 1));
    const Eigen::Vector2d g2 = cross_v / s_v;
    Eigen::Matrix2d s2;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            s2(a, b) = s1(2 + a, 2 + b) - cross_v(a) * cross_v(b) / s_v;
        }
    }
    fp.mu_b << mu(4), mu(5);
    fp.g1_b << g1(2), g1(3);
    fp.g2_b = g2;
    fp.cx = rc.cx;
    fp.cp = rc.cp;
    fp.sqrt_eta_v = std::sqrt(rc.eta.victor);
    const Eigen::Matrix2d s_vic =
        rc.eta.victor * s2 + (1.0 - rc.eta.victor) * Eigen::Matrix2d::Identity();
    if (!(s_vic(0, 0) > 0.0) || !(s_vic(1, 1) > 0.0)) {
        throw corrupt_state_error("verification quadrature has non-positive variance");
    }
    fp.sd_vx = std::sqrt(s_vic(0, 0));
    fp.sd_vp = std::sqrt(s_vic(1, 1));
    return fp;
}

ShotRecord simulate_shot_fast(const FastPath& fp, bool victor_x, std::mt19937_64& rng) {
    ShotRecord rec;
    rec.x_u = fp.mu_u + fp.sd_u * draw_std_normal(rng);
    const double h1 = rec.x_u - fp.mu_u;
    const double pv_mean = fp.mu_v + fp.k_v * h1;
    rec.p_v = pv_mean + fp.sd_v * draw_std_normal(rng);
    const double h2 = rec.p_v - pv_mean;
    rec.dx = fp.cx * rec.x_u;
    rec.dp = fp.cp * rec.p_v;
    const double bob_x = fp.mu_b(0) + fp.g1_b(0) * h1 + fp.g2_b(0) * h2 + rec.dx;
    const double bob_p = fp.mu_b(1) + fp.g1_b(1) * h1 + fp.g2_b(1) * h2 + rec.dp;
    if (victor_x) {
        rec.victor_quad = Quadrature::X;
        rec.victor_value = fp.sqrt_eta_v * bob_x + fp.sd_vx * draw_std_normal(rng);
    } else {
        rec.victor_quad = Quadrature::P;
        rec.victor_value = fp.sqrt_eta_v * bob_p + fp.sd_vp * draw_std_normal(rng);
    }
    return rec;
}

}  // namespace

MonteCarloResult run_monte_carlo(const TeleporterConfig& config, bool keep_trace) {
    const detail::ResolvedConfig rc = detail::resolve(config);
    const GaussianState input = detail::input_state(rc);
    const int workers = config.workers;
    const auto parts = detail::partition_shots(config.shots, workers);

    const bool use_fast_path = !rc.any_shot_jitter;
    std::optional<FastPath> fp;
    if (use_fast_path) {
        fp = make_fast_path(rc, detail::premeasurement_state(rc, input, nullptr, nullptr));
    }

    std::vector<detail::MomentAccumulator> acc(static_cast<size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    TeleportTrace trace(keep_trace ? static_cast<size_t>(config.shots) : 0);

#pragma omp parallel for schedule(static)
    for (int w = 0; w < workers; ++w) {
        try {
            std::mt19937_64 rng = detail::worker_rng(config.seed, w);
            const long start = parts[static_cast<size_t>(w)].first;
            const long count = parts[static_cast<size_t>(w)].second;
            for (long i = 0; i < count; ++i) {
                const long shot = start + i;
                const bool victor_x = (shot % 2 == 0);
                const ShotRecord rec =
                    use_fast_path ? simulate_shot_fast(*fp, victor_x, rng)
                                  : detail::simulate_shot_circuit(rc, input, victor_x, rng);
                acc[static_cast<size_t>(w)].add(rec);
                if (keep_trace) {
                    trace[static_cast<size_t>(shot)] = rec;
                }
            }
        } catch (...) {
            errors[static_cast<size_t>(w)] = std::current_exception();
        }
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }

    detail::MomentAccumulator total;
    for (const auto& a : acc) {
        total.merge(a);
    }
    return MonteCarloResult{detail::report_from_moments(rc, config, total), std::move(trace)};
}

// ---- Sweeps and chains ----

std::vector<GainSweepRow> sweep_gain(const TeleporterConfig& config,
                                     const std::vector<double>& gains) {
    std::vector<GainSweepRow> rows;
    rows.reserve(gains.size());
    for (const double g : gains) {
        TeleporterConfig cfg = config;
        cfg.gain_x = g;
        cfg.gain_p = g;
        const TeleportReport rep = run_heisenberg(cfg);
        GainSweepRow row;
        row.gain = g;
        row.sigma_x = rep.sigma_x;
        row.sigma_p = rep.sigma_p;
        row.sigma_x_db = rep.sigma_x_db;
        row.sigma_p_db = rep.sigma_p_db;
        row.fidelity = rep.fidelity;
        row.n_s = rep.n_s;
        rows.push_back(row);
    }
    return rows;
}

SequentialResult run_sequential(const TeleporterConfig& config, int steps) {
    require(steps >= 1 && steps <= 1000, "sequential steps must be in [1, 1000]");
    const detail::ResolvedConfig rc = detail::resolve(config);
    GaussianState current = detail::input_state(rc);
    const Eigen::Vector2d reference = rc.input_mean;

    SequentialResult out;
    out.steps.reserve(static_cast<size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        HeisenbergRun run = run_heisenberg_state(config, current, reference, nullptr);
        out.steps.push_back(run.report);
        current = std::move(run.bob_out);
    }
    out.final_fidelity = out.steps.back().fidelity;
    return out;
}

}  // namespace cvqt
