// Acceptance checks for the teleportation simulator.  Each criterion
// prints exactly one line
//
//     [ACCEPTANCE] NN <name> ... PASS|FAIL
//
// followed by indented details for any failed expectation, and the binary
// exits nonzero when any criterion fails.  Every tolerance is pinned in
// the constants right below so a regression cannot loosen them silently.

#include "cvqt/calibration.hpp"
#include "cvqt/config_io.hpp"
#include "cvqt/metrics.hpp"
#include "cvqt/opo.hpp"
#include "cvqt/teleporter.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cvqt;

namespace {

// ---- Pinned tolerances ---------------------------------------------------

constexpr double kFidelityWindow = 0.003;        // around quoted fidelities
constexpr double kCapacityWindow833 = 0.15;      // n_s at F = 0.833
constexpr double kCapacityWindow76 = 0.1;        // n_s at F = 0.76
constexpr double kVarianceDbWindow = 0.05;       // around the quoted +1.46 dB
constexpr double kExactTol = 1e-12;              // closed-form identities
constexpr double kOracleTol = 1e-9;              // circuit vs closed form
constexpr double kGainBoundWindow = 1e-4;        // around the quoted 0.0135
constexpr double kSigmaBands = 5.0;              // Monte Carlo agreement band
constexpr double kBudgetSqueezeLoDb = -8.5;      // effective squeezing window
constexpr double kBudgetSqueezeHiDb = -7.0;
constexpr double kSidebandLossLoDb = 0.1;        // sideband degradation window
constexpr double kSidebandLossHiDb = 0.45;
constexpr double kPhysicalitySlack = 1e-9;       // nu >= 1 - this, every stage
constexpr double kSymplecticCheckTol = 1e-10;    // |S Omega S^T - Omega|
constexpr double kEnsembleBudgetSeconds = 30.0;  // criterion 10 wall budget
constexpr int kEnsembleConfigs = 50;
constexpr long kEnsembleShots = 100000;

std::string config_dir() { return CVQT_CONFIG_DIR; }

class Criterion {
public:
    Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {}

    void expect(bool ok, const std::string& detail) {
        if (!ok) {
            failures_.push_back(detail);
        }
    }

    void expect_near(const std::string& label, double actual, double expected, double tol) {
        if (!(std::abs(actual - expected) <= tol)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << label << ": got " << actual << ", want " << expected << " +- " << tol;
            failures_.push_back(msg.str());
        }
    }

    void expect_in(const std::string& label, double actual, double lo, double hi) {
        if (!(actual >= lo && actual <= hi)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << label << ": got " << actual << ", want within [" << lo << ", " << hi << "]";
            failures_.push_back(msg.str());
        }
    }

    bool passed() const { return failures_.empty(); }

    void print() const {
        std::printf("[ACCEPTANCE] %02d %-34s ... %s\n", id_, name_.c_str(),
                    passed() ? "PASS" : "FAIL");
        for (const auto& f : failures_) {
            std::printf("             - %s\n", f.c_str());
        }
        std::fflush(stdout);
    }

private:
    int id_;
    std::string name_;
    std::vector<std::string> failures_;
};

TeleporterConfig teleporter_from(const std::string& file) {
    return load_experiment_config(config_dir() + "/" + file).teleporter;
}

// ---- 1: measured variances imply the headline fidelity -------------------

void check_variances_to_fidelity(Criterion& c) {
    const double sx = from_db(1.44);
    const double sp = from_db(1.49);
    const double f = fidelity_from_variances(sx, sp);
    c.expect_near("F(+1.44 dB, +1.49 dB)", f, 0.833, kFidelityWindow);
    c.expect_near("exact value", f, 0.832913665, 1e-8);
}

// ---- 2: fidelity converts to sequential capacity -------------------------

void check_fidelity_to_capacity(Criterion& c) {
    const SequentialCapacity high = sequential_capacity(0.833);
    c.expect_near("n_s(0.833)", high.n_s, 4.99, kCapacityWindow833);
    c.expect_near("r_eff(0.833)", high.r_eff, 0.8035199148750436, 1e-10);

    const SequentialCapacity low = sequential_capacity(0.76);
    c.expect_near("n_s(0.76)", low.n_s, 3.17, kCapacityWindow76);
}

// ---- 3: the classical protocol sits at three vacuum units ----------------

void check_classical_floor(Criterion& c) {
    const TeleportReport det = run_heisenberg(TeleporterConfig{});
    c.expect_near("deterministic sigma_x", det.sigma_x, 3.0, kExactTol);
    c.expect_near("deterministic sigma_p", det.sigma_p, 3.0, kExactTol);
    c.expect_near("deterministic fidelity", det.fidelity, 0.5, kExactTol);

    TeleporterConfig mc_cfg = teleporter_from("classical.cfg");
    const TeleportReport mc = run_monte_carlo(mc_cfg, false).report;
    c.expect(mc.shots == kEnsembleShots, "classical config must run 100000 shots");
    c.expect_near("sampled sigma_x", mc.sigma_x, 3.0, kSigmaBands * mc.se_sigma_x);
    c.expect_near("sampled sigma_p", mc.sigma_p, 3.0, kSigmaBands * mc.se_sigma_p);
    c.expect_near("sampled fidelity", mc.fidelity, 0.5, kSigmaBands * mc.se_fidelity);
}

// ---- 4: headline -7 dB operating point -----------------------------------

void check_headline_point(Criterion& c) {
    const TeleportReport rep = run_heisenberg(teleporter_from("headline.cfg"));
    c.expect_near("sigma_x (dB)", rep.sigma_x_db, 1.46, kVarianceDbWindow);
    c.expect_near("sigma_p (dB)", rep.sigma_p_db, 1.46, kVarianceDbWindow);
    c.expect_near("fidelity", rep.fidelity, 0.834, kFidelityWindow);
    c.expect_near("exact sigma", rep.sigma_x, 1.399052462994, 1e-10);
}

// ---- 5: slightly reduced gain buys fidelity ------------------------------

void check_tuned_gain(Criterion& c) {
    TeleporterConfig cfg = teleporter_from("headline.cfg");
    cfg.gain_x = 0.99;
    cfg.gain_p = 0.99;
    const TeleportReport rep = run_heisenberg(cfg);
    c.expect_near("fidelity at g = 0.99", rep.fidelity, 0.842, kFidelityWindow);
    c.expect(rep.fidelity > run_heisenberg(teleporter_from("headline.cfg")).fidelity,
             "g = 0.99 must beat unity gain for a vacuum input");
}

// ---- 6: circuit reproduces the closed-form gain dependence ---------------

void check_gain_formula(Criterion& c) {
    int checked = 0;
    for (int ir = 0; ir < 10; ++ir) {
        const double r = 1.35 * ir / 9.0;
        TeleporterConfig cfg;
        cfg.squeezer_a.r = r;
        cfg.squeezer_b.r = r;
        for (int ig = 0; ig < 10; ++ig) {
            const double g = 2.0 * ig / 9.0;
            cfg.gain_x = g;
            cfg.gain_p = g;
            const TeleportReport rep = run_heisenberg(cfg);
            const double expect = oracle::teleport_sigma_pure(g, r);
            std::ostringstream label;
            label << "sigma at r = " << r << ", g = " << g;
            c.expect_near(label.str() + " (x)", rep.sigma_x, expect, kOracleTol);
            c.expect_near(label.str() + " (p)", rep.sigma_p, expect, kOracleTol);
            ++checked;
        }
    }
    c.expect(checked == 100, "grid must cover 100 (r, g) pairs");
}

// ---- 7: sequential chaining follows the capacity law ---------------------

void check_sequential_law(Criterion& c) {
    for (double db : {-7.0, -4.0}) {
        TeleporterConfig cfg;
        cfg.squeezer_a.kind = SqueezerKind::SqueezingDb;
        cfg.squeezer_a.squeezing_db = db;
        cfg.squeezer_b = cfg.squeezer_a;
        const double s = from_db(db);
        const SequentialResult chain = run_sequential(cfg, 10);
        for (int k = 1; k <= 10; ++k) {
            std::ostringstream label;
            label << "F after " << k << " hops at " << db << " dB";
            c.expect_near(label.str(), chain.steps[static_cast<size_t>(k - 1)].fidelity,
                          1.0 / (1.0 + k * s), kOracleTol);
        }
        // One-hop capacity identity: n_s = e^{2r} = 1 / s.
        c.expect_near("one-hop n_s * e^{-2r}", chain.steps.front().n_s * s, 1.0, kOracleTol);

        // The predicted number of supportable hops is where the chain
        // actually crosses the classical 1/2.
        const int supported = static_cast<int>(chain.steps.front().n_s);
        c.expect(supported >= 1 && supported < 10, "capacity must fall inside the chain");
        c.expect(chain.steps[static_cast<size_t>(supported - 1)].fidelity >= 0.5,
                 "chain must stay quantum through the predicted hop count");
        c.expect(chain.steps[static_cast<size_t>(supported)].fidelity < 0.5,
                 "chain must drop below 1/2 one hop past the prediction");
    }
}

// ---- 8: suppression measurement bounds the gain error --------------------

void check_gain_bound(Criterion& c) {
    const double bound = gain_bound_from_suppression(37.4);
    c.expect_near("bound from 37.4 dB", bound, 0.0135, kGainBoundWindow);
    c.expect_near("exact bound", bound, 0.01348962882591654, kExactTol);

    // Round trip through the simulated cancellation measurement: a gain
    // off by exactly that bound reproduces the measured suppression.
    const CancellationResult res = simulate_cancellation(1.0 + bound, 1.0 - bound, 1000.0);
    c.expect_near("suppression at g = 1 + bound", res.suppression_x_db, 37.4, 1e-9);
    c.expect_near("suppression at g = 1 - bound", res.suppression_p_db, 37.4, 1e-9);
}

// ---- 9: OPO noise budget reproduces the measured resource ----------------

void check_opo_budget(Criterion& c) {
    const ExperimentConfig budget = load_experiment_config(config_dir() + "/budget.cfg");

    auto effective_db = [&](const SqueezerSpec& spec, double lock_jitter_deg) {
        const SqueezeLevels lv = jitter_average(spec.levels(), lock_jitter_deg);
        return to_db(lv.squeezed);
    };
    const double arm_a_db = effective_db(budget.teleporter.squeezer_a,
                                         budget.teleporter.jitter.squeezer_a_deg);
    const double arm_b_db = effective_db(budget.teleporter.squeezer_b,
                                         budget.teleporter.jitter.squeezer_b_deg);
    c.expect_in("arm a effective squeezing (dB)", arm_a_db, kBudgetSqueezeLoDb,
                kBudgetSqueezeHiDb);
    c.expect_in("arm b effective squeezing (dB)", arm_b_db, kBudgetSqueezeLoDb,
                kBudgetSqueezeHiDb);

    // Measuring away from DC costs a fraction of a dB.
    for (const SqueezerSpec* spec :
         {&budget.teleporter.squeezer_a, &budget.teleporter.squeezer_b}) {
        OpoParams at_dc = spec->opo;
        at_dc.sideband_mhz = 0.0;
        const double loss_db =
            to_db(squeezing_spectrum(spec->opo).squeezed / squeezing_spectrum(at_dc).squeezed);
        std::ostringstream label;
        label << "sideband cost at pump gain " << spec->opo.pump_gain;
        c.expect_in(label.str(), loss_db, kSidebandLossLoDb, kSidebandLossHiDb);
    }

    // Without detection loss the spectra stay pure at every sideband.
    for (double gain : {1.5, 4.0, 9.0, 11.2, 30.0}) {
        for (double f : {0.0, 1.25, 5.0}) {
            OpoParams pure;
            pure.pump_gain = gain;
            pure.efficiency = 1.0;
            pure.sideband_mhz = f;
            const SqueezeLevels lv = squeezing_spectrum(pure);
            std::ostringstream label;
            label << "uncertainty product at G = " << gain << ", f = " << f;
            c.expect_near(label.str(), lv.squeezed * lv.antisqueezed, 1.0, kExactTol);
        }
    }

    // Each imperfection on its own monotonically degrades the squeezing.
    OpoParams base = budget.teleporter.squeezer_a.opo;
    double prev = jitter_average(squeezing_spectrum(base), 0.0).squeezed;
    for (double j : {0.5, 1.0, 2.0}) {
        const double cur = jitter_average(squeezing_spectrum(base), j).squeezed;
        c.expect(cur > prev, "more lock jitter must weaken the squeezing");
        prev = cur;
    }
    prev = 0.0;  // below any squeezed level
    for (double eta : {1.0, 0.95, 0.89, 0.8}) {
        OpoParams p = base;
        p.efficiency = eta;
        const double cur = squeezing_spectrum(p).squeezed;
        c.expect(cur > prev, "less efficiency must weaken the squeezing");
        prev = cur;
    }
    prev = 0.0;
    for (double f : {0.0, 1.25, 2.5, 5.0}) {
        OpoParams p = base;
        p.sideband_mhz = f;
        const double cur = squeezing_spectrum(p).squeezed;
        c.expect(cur > prev, "higher sideband must weaken the squeezing");
        prev = cur;
    }

    // The full budget run teleports well inside the quantum regime, and
    // switching the lock jitter off can only improve it.
    const double budget_f = run_heisenberg(budget.teleporter).fidelity;
    c.expect_in("budget fidelity", budget_f, 0.8, 0.9);
    TeleporterConfig steady = budget.teleporter;
    steady.jitter = JitterSpec{};
    c.expect(run_heisenberg(steady).fidelity > budget_f,
             "removing lock jitter must improve the budget fidelity");
}

// ---- 10: Monte Carlo ensemble matches moment propagation -----------------

void check_monte_carlo_ensemble(Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 gen(2026);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };

    for (int i = 0; i < kEnsembleConfigs; ++i) {
        TeleporterConfig cfg;
        cfg.squeezer_a.kind = SqueezerKind::SqueezingDb;
        cfg.squeezer_a.squeezing_db = uniform(-10.0, 0.0);
        cfg.squeezer_b.kind = SqueezerKind::SqueezingDb;
        cfg.squeezer_b.squeezing_db = uniform(-10.0, 0.0);
        cfg.gain_x = uniform(0.85, 1.1);
        cfg.gain_p = uniform(0.85, 1.1);
        cfg.eta.path_a = uniform(0.85, 1.0);
        cfg.eta.path_b = uniform(0.85, 1.0);
        cfg.eta.alice_x = uniform(0.8, 1.0);
        cfg.eta.alice_p = uniform(0.8, 1.0);
        cfg.eta.victor = uniform(0.9, 1.0);
        cfg.input.mean_x = uniform(-2.0, 2.0);
        cfg.input.mean_p = uniform(-2.0, 2.0);
        if (i % 10 < 3) {  // a third of the ensemble exercises shot jitter
            cfg.jitter.squeezer_a_deg = uniform(0.0, 1.5);
            cfg.jitter.squeezer_b_deg = uniform(0.0, 1.5);
            cfg.jitter.epr_hbs_deg = uniform(0.0, 1.5);
            cfg.jitter.alice_hbs_deg = uniform(0.0, 1.5);
            cfg.jitter.victor_lo_deg = uniform(0.0, 1.5);
        }
        cfg.engine = Engine::MonteCarlo;
        cfg.shots = kEnsembleShots;
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        cfg.workers = (i % 4) + 1;

        const TeleportReport expect = run_heisenberg(cfg);
        const TeleportReport mc = run_monte_carlo(cfg, false).report;

        std::ostringstream tag;
        tag << "config " << i;
        c.expect_near(tag.str() + " sigma_x", mc.sigma_x, expect.sigma_x,
                      kSigmaBands * mc.se_sigma_x);
        c.expect_near(tag.str() + " sigma_p", mc.sigma_p, expect.sigma_p,
                      kSigmaBands * mc.se_sigma_p);
        c.expect_near(tag.str() + " fidelity", mc.fidelity, expect.fidelity,
                      kSigmaBands * mc.se_fidelity);

        if (i % 10 == 0) {
            const TeleportReport again = run_monte_carlo(cfg, false).report;
            c.expect(again == mc, tag.str() + ": rerun must be bit-identical");
        }
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream label;
    label << "ensemble wall time " << elapsed << " s";
    c.expect(elapsed < kEnsembleBudgetSeconds, label.str() + " exceeds the budget");
}

// ---- 11: every stage of every run stays physical -------------------------

void check_physicality(Criterion& c) {
    std::vector<TeleporterConfig> configs;
    configs.push_back(teleporter_from("headline.cfg"));
    configs.push_back(teleporter_from("budget.cfg"));
    {
        TeleporterConfig rough;
        rough.squeezer_a.r = 1.2;
        rough.squeezer_b.r = 0.3;
        rough.gain_x = 1.05;
        rough.gain_p = 0.95;
        rough.gain_step_db = 0.25;
        rough.eta = {0.9, 0.8, 0.85, 0.95, 0.9};
        rough.jitter = {2.0, 2.0, 2.0, 2.0, 2.0};
        rough.input = {2.0, -1.0};
        rough.probe_tone = 50.0;
        configs.push_back(rough);
    }

    for (size_t ci = 0; ci < configs.size(); ++ci) {
        StateAudit audit;
        run_heisenberg(configs[ci], &audit);
        c.expect(audit.states.size() >= 5, "audit must record the intermediate stages");
        for (const auto& [name, state] : audit.states) {
            const double nu = state.min_symplectic_eigenvalue();
            if (!(nu >= 1.0 - kPhysicalitySlack)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "config " << ci << " stage '" << name << "': min nu = " << nu;
                c.expect(false, msg.str());
            }
        }
    }

    // The symplectic condition itself, on the building blocks and chains.
    auto check_matrix = [&](const Eigen::MatrixXd& s, const std::string& label) {
        c.expect(oracle::is_symplectic(s, kSymplecticCheckTol),
                 label + " violates the symplectic condition");
    };
    for (double theta : {0.0, 0.3, 1.0, -2.2, M_PI}) {
        check_matrix(SymplecticOp::rotation(theta).matrix(), "rotation");
    }
    for (double r : {0.0, 0.5, 1.5, 3.0}) {
        for (double angle : {0.0, 0.7, -1.1}) {
            check_matrix(SymplecticOp::squeezer(r, angle).matrix(), "squeezer");
        }
    }
    for (double t : {0.0, 0.25, 0.5, 0.99, 1.0}) {
        for (double phi : {0.0, M_PI / 2, -0.8}) {
            check_matrix(SymplecticOp::beam_splitter(t, phi).matrix(), "beam splitter");
        }
    }
    const Eigen::MatrixXd chain = SymplecticOp::beam_splitter(0.5, M_PI / 2).matrix() *
                                  SymplecticOp::beam_splitter(0.7, 0.3).matrix() *
                                  SymplecticOp::beam_splitter(0.2, -1.0).matrix();
    check_matrix(chain, "beam-splitter chain");
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<void(Criterion&)> run;
    };
    const std::vector<Entry> entries = {
        {1, "variances-imply-fidelity", check_variances_to_fidelity},
        {2, "fidelity-implies-capacity", check_fidelity_to_capacity},
        {3, "classical-floor", check_classical_floor},
        {4, "headline-operating-point", check_headline_point},
        {5, "tuned-gain-fidelity", check_tuned_gain},
        {6, "gain-formula-oracle", check_gain_formula},
        {7, "sequential-capacity-law", check_sequential_law},
        {8, "suppression-gain-bound", check_gain_bound},
        {9, "opo-noise-budget", check_opo_budget},
        {10, "monte-carlo-vs-heisenberg", check_monte_carlo_ensemble},
        {11, "physicality-audit", check_physicality},
    };

    int failed = 0;
    for (const auto& entry : entries) {
        Criterion criterion(entry.id, entry.name);
        try {
            entry.run(criterion);
        } catch (const std::exception& e) {
            criterion.expect(false, std::string("threw: ") + e.what());
        }
        criterion.print();
        if (!criterion.passed()) {
            ++failed;
        }
    }

    if (failed == 0) {
        std::printf("[ACCEPTANCE] all %zu criteria passed\n", entries.size());
    } else {
        std::printf("[ACCEPTANCE] %d of %zu criteria FAILED\n", failed, entries.size());
    }
    return failed == 0 ? 0 : 1;
}
