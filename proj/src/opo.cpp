#include "cvqt/opo.hpp"

#include "cvqt/metrics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cvqt {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double deg) {
    return deg * kPi / 180.0;
}

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

void OpoParams::validate() const {
    require(std::isfinite(pump_gain) && pump_gain >= 1.0,
            "OpoParams: pump_gain must be >= 1");
    require(std::isfinite(efficiency) && efficiency >= 0.0 && efficiency <= 1.0,
            "OpoParams: efficiency must be in [0, 1]");
    require(std::isfinite(jitter_rms_deg) && jitter_rms_deg >= 0.0,
            "OpoParams: jitter_rms_deg must be >= 0");
    require(std::isfinite(sideband_mhz) && sideband_mhz >= 0.0,
            "OpoParams: sideband_mhz must be >= 0");
    require(std::isfinite(cavity_hwhm_mhz) && cavity_hwhm_mhz > 0.0,
            "OpoParams: cavity_hwhm_mhz must be > 0");
}

double SqueezeLevels::squeezed_db() const {
    return to_db(squeezed);
}

double SqueezeLevels::antisqueezed_db() const {
    return to_db(antisqueezed);
}

double pump_ratio_from_gain(double pump_gain) {
    require(std::isfinite(pump_gain) && pump_gain >= 1.0,
            "pump_ratio_from_gain: pump_gain must be >= 1");
    return 1.0 - 1.0 / std::sqrt(pump_gain);
}

SqueezeLevels squeezing_spectrum(const OpoParams& params) {
    params.validate();
    const double x = pump_ratio_from_gain(params.pump_gain);
    const double detuning_sq = std::pow(params.sideband_mhz / params.cavity_hwhm_mhz, 2);
    const double dip = params.efficiency * 4.0 * x / (std::pow(1.0 + x, 2) + detuning_sq);
    const double bump = params.efficiency * 4.0 * x / (std::pow(1.0 - x, 2) + detuning_sq);
    return SqueezeLevels{1.0 - dip, 1.0 + bump};
}

SqueezeLevels jitter_average(const SqueezeLevels& levels, double theta_rms_deg) {
    require(std::isfinite(theta_rms_deg) && theta_rms_deg >= 0.0,
            "jitter_average: theta_rms_deg must be >= 0");
    const double s2 = std::pow(std::sin(deg_to_rad(theta_rms_deg)), 2);
    const double c2 = 1.0 - s2;
    return SqueezeLevels{c2 * levels.squeezed + s2 * levels.antisqueezed,
                         c2 * levels.antisqueezed + s2 * levels.squeezed};
}

SqueezeLevels jitter_average_mc(const SqueezeLevels& levels, double theta_rms_deg,
                                long draws, std::uint64_t seed) {
    require(std::isfinite(theta_rms_deg) && theta_rms_deg >= 0.0,
            "jitter_average_mc: theta_rms_deg must be >= 0");
    require(draws > 0, "jitter_average_mc: draws must be > 0");
    if (theta_rms_deg == 0.0) {
        return levels;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, deg_to_rad(theta_rms_deg));
    double sum_sq = 0.0;
    double sum_anti = 0.0;
    for (long i = 0; i < draws; ++i) {
        const double theta = normal(rng);
        const double s2 = std::pow(std::sin(theta), 2);
        const double c2 = 1.0 - s2;
        sum_sq += c2 * levels.squeezed + s2 * levels.antisqueezed;
        sum_anti += c2 * levels.antisqueezed + s2 * levels.squeezed;
    }
    return SqueezeLevels{sum_sq / static_cast<double>(draws),
                         sum_anti / static_cast<double>(draws)};
}

double effective_r(const SqueezeLevels& levels) {
    require(std::isfinite(levels.squeezed) && levels.squeezed > 0.0,
            "effective_r: squeezed variance must be > 0");
    return -0.5 * std::log(levels.squeezed);
}

}  // namespace cvqt
