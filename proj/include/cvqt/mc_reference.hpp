#pragma once

// Serial reference Monte Carlo engine.  Runs every shot through the
// generic Gaussian-state circuit (no precomputation, no OpenMP) using the
// same worker partition and draw order as the production engine, so the
// two can be compared shot by shot.  Kept for testing and benchmarking.

#include "cvqt/teleporter.hpp"

namespace cvqt::reference {

MonteCarloResult run_monte_carlo(const TeleporterConfig& config, bool keep_trace = true);

}  // namespace cvqt::reference
