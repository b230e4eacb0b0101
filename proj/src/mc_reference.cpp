#include "cvqt/mc_reference.hpp"

#include "engine_internal.hpp"

namespace cvqt::reference {

MonteCarloResult run_monte_carlo(const TeleporterConfig& config, bool keep_trace) {
    const detail::ResolvedConfig rc = detail::resolve(config);
    const GaussianState input = detail::input_state(rc);
    const auto parts = detail::partition_shots(config.shots, config.workers);

    // Accumulate per worker and merge in worker order, exactly like the
    // production engine, so the two agree bit for bit whenever they run
    // the same per-shot code path.
    std::vector<detail::MomentAccumulator> acc(static_cast<size_t>(config.workers));
    TeleportTrace trace(keep_trace ? static_cast<size_t>(config.shots) : 0);
    for (int w = 0; w < config.workers; ++w) {
        std::mt19937_64 rng = detail::worker_rng(config.seed, w);
        const long start = parts[static_cast<size_t>(w)].first;
        const long count = parts[static_cast<size_t>(w)].second;
        for (long i = 0; i < count; ++i) {
            const long shot = start + i;
            const bool victor_x = (shot % 2 == 0);
            const ShotRecord rec = detail::simulate_shot_circuit(rc, input, victor_x, rng);
            acc[static_cast<size_t>(w)].add(rec);
            if (keep_trace) {
                trace[static_cast<size_t>(shot)] = rec;
            }
        }
    }
    detail::MomentAccumulator total;
    for (const auto& a : acc) {
        total.merge(a);
    }
    return MonteCarloResult{detail::report_from_moments(rc, config, total), std::move(trace)};
}

}  // namespace cvqt::reference
