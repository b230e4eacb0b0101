// Benchmark: serial reference Monte Carlo engine vs the OpenMP production
// engine on the same config, plus a cross-check that their statistics
// agree (bit-identical when both take the generic per-shot path, i.e.
// with lock jitter enabled).

#include "CLI11.hpp"

#include "cvqt/mc_reference.hpp"
#include "cvqt/teleporter.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

cvqt::TeleporterConfig bench_config(long shots, int workers, bool jitter) {
    cvqt::TeleporterConfig cfg;
    cfg.squeezer_a.kind = cvqt::SqueezerKind::SqueezingDb;
    cfg.squeezer_a.squeezing_db = -7.0;
    cfg.squeezer_b = cfg.squeezer_a;
    cfg.eta.path_a = 0.97;
    cfg.eta.path_b = 0.97;
    cfg.eta.alice_x = 0.99;
    cfg.eta.alice_p = 0.99;
    if (jitter) {
        cfg.jitter.squeezer_a_deg = 1.0;
        cfg.jitter.squeezer_b_deg = 1.0;
        cfg.jitter.epr_hbs_deg = 1.0;
        cfg.jitter.alice_hbs_deg = 1.0;
        cfg.jitter.victor_lo_deg = 1.0;
    }
    cfg.engine = cvqt::Engine::MonteCarlo;
    cfg.shots = shots;
    cfg.seed = 42;
    cfg.workers = workers;
    return cfg;
}

template <typename F>
std::pair<cvqt::TeleportReport, double> timed(F&& run) {
    const auto t0 = std::chrono::steady_clock::now();
    cvqt::MonteCarloResult result = run();
    const auto t1 = std::chrono::steady_clock::now();
    return {result.report, std::chrono::duration<double>(t1 - t0).count()};
}

void print_row(const char* name, long shots, int workers, double seconds) {
    std::printf("%-22s %10ld shots  %3d workers  %8.3f s  %12.0f shots/s\n", name, shots,
                workers, seconds, static_cast<double>(shots) / seconds);
}

}  // namespace

int main(int argc, char** argv) {
    long shots = 200000;
    int workers = 0;
    bool jitter = false;

    CLI::App app{"Teleporter Monte Carlo engine benchmark"};
    app.add_option("--shots", shots, "Shots per run");
    app.add_option("--workers", workers, "Worker count (default: OpenMP thread count)");
    app.add_flag("--jitter", jitter,
                 "Enable 1 degree lock jitter (both engines then share the generic "
                 "per-shot path and must agree bit for bit)");
    CLI11_PARSE(app, argc, argv);

    if (workers <= 0) {
#ifdef _OPENMP
        workers = omp_get_max_threads();
#else
        workers = 1;
#endif
    }

    const cvqt::TeleporterConfig cfg = bench_config(shots, workers, jitter);

    const auto [ref_report, ref_seconds] =
        timed([&] { return cvqt::reference::run_monte_carlo(cfg, false); });
    const auto [prod_report, prod_seconds] =
        timed([&] { return cvqt::run_monte_carlo(cfg, false); });

    std::printf("config: -7 dB squeezers, path eta 0.97, detector eta 0.99, jitter %s\n",
                jitter ? "1 deg on all five locks" : "off");
    print_row("reference (serial)", shots, workers, ref_seconds);
    print_row("production (OpenMP)", shots, workers, prod_seconds);
    std::printf("speedup: %.2fx\n", ref_seconds / prod_seconds);

    const double d_sx = std::abs(ref_report.sigma_x - prod_report.sigma_x);
    const double d_sp = std::abs(ref_report.sigma_p - prod_report.sigma_p);
    const double d_f = std::abs(ref_report.fidelity - prod_report.fidelity);
    std::printf("agreement: |d sigma_x| = %.3g, |d sigma_p| = %.3g, |d fidelity| = %.3g%s\n",
                d_sx, d_sp, d_f,
                (d_sx == 0.0 && d_sp == 0.0 && d_f == 0.0) ? "  (bit-identical)" : "");

    const double tol = 1e-9 * std::max(1.0, std::max(ref_report.sigma_x, ref_report.sigma_p));
    if (d_sx > tol || d_sp > tol || d_f > 1e-9) {
        std::printf("ENGINES DISAGREE beyond tolerance\n");
        return 1;
    }
    return 0;
}
