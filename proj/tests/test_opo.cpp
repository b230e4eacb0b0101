#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvqt/opo.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace cvqt;

TEST_CASE("parameter validation") {
    OpoParams ok;
    ok.pump_gain = 9.0;
    ok.efficiency = 0.89;
    CHECK_NOTHROW(ok.validate());

    auto bad = [](auto&& tweak) {
        OpoParams p;
        p.pump_gain = 4.0;
        tweak(p);
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    };
    bad([](OpoParams& p) { p.pump_gain = 0.5; });
    bad([](OpoParams& p) { p.efficiency = -0.01; });
    bad([](OpoParams& p) { p.efficiency = 1.01; });
    bad([](OpoParams& p) { p.jitter_rms_deg = -1.0; });
    bad([](OpoParams& p) { p.sideband_mhz = -0.1; });
    bad([](OpoParams& p) { p.cavity_hwhm_mhz = 0.0; });
}

TEST_CASE("pump ratio from measured parametric gain") {
    CHECK(pump_ratio_from_gain(1.0) == doctest::Approx(0.0));
    CHECK(pump_ratio_from_gain(9.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(pump_ratio_from_gain(4.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pump_ratio_from_gain(11.2) == doctest::Approx(0.701192847666).epsilon(1e-10));
    CHECK_THROWS_AS(pump_ratio_from_gain(0.9), std::invalid_argument);
}

TEST_CASE("zero-frequency spectrum at the operating point") {
    OpoParams p;
    p.pump_gain = 9.0;
    p.efficiency = 0.89;
    const SqueezeLevels lv = squeezing_spectrum(p);
    // 1 -+ 0.89 * (8/3) / (1 +- 2/3)^2: exactly 0.1456 and 22.36.
    CHECK(lv.squeezed == doctest::Approx(0.1456).epsilon(1e-12));
    CHECK(lv.antisqueezed == doctest::Approx(22.36).epsilon(1e-12));
    CHECK(lv.squeezed_db() == doctest::Approx(-8.368386).epsilon(1e-6));
    CHECK(lv.antisqueezed_db() == doctest::Approx(13.494718).epsilon(1e-6));
}

TEST_CASE("lossless spectra are pure at every sideband") {
    for (double gain : {1.5, 4.0, 9.0, 11.2, 30.0}) {
        for (double f : {0.0, 0.5, 1.25, 5.0, 20.0}) {
            OpoParams p;
            p.pump_gain = gain;
            p.efficiency = 1.0;
            p.sideband_mhz = f;
            p.cavity_hwhm_mhz = 10.0;
            const SqueezeLevels lv = squeezing_spectrum(p);
            CHECK(lv.squeezed * lv.antisqueezed == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(lv.squeezed > 0.0);
        }
    }
}

TEST_CASE("spectrum agrees with the closed-form oracle on a grid") {
    for (double gain : {2.0, 9.0, 11.2}) {
        for (double eta : {1.0, 0.89, 0.6}) {
            for (double f : {0.0, 1.25, 7.5}) {
                OpoParams p;
                p.pump_gain = gain;
                p.efficiency = eta;
                p.sideband_mhz = f;
                p.cavity_hwhm_mhz = 10.0;
                const SqueezeLevels lv = squeezing_spectrum(p);
                const auto ref = oracle::opo_levels(gain, eta, f / 10.0);
                CHECK(lv.squeezed == doctest::Approx(ref.squeezed).epsilon(1e-13));
                CHECK(lv.antisqueezed == doctest::Approx(ref.antisqueezed).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("finite sideband degrades the squeezing by the expected amount") {
    OpoParams p;
    p.pump_gain = 9.0;
    p.efficiency = 0.89;
    p.cavity_hwhm_mhz = 10.0;
    const double at_dc = squeezing_spectrum(p).squeezed;
    p.sideband_mhz = 1.25;
    const double at_sideband = squeezing_spectrum(p).squeezed;
    CHECK(at_sideband == doctest::Approx(0.150379117464).epsilon(1e-10));
    const double degradation_db = 10.0 * std::log10(at_sideband / at_dc);
    CHECK(degradation_db == doctest::Approx(0.140262).epsilon(1e-4));
}

TEST_CASE("deterministic jitter average") {
    SqueezeLevels lv{0.1456, 22.36};

    const SqueezeLevels same = jitter_average(lv, 0.0);
    CHECK(same.squeezed == lv.squeezed);
    CHECK(same.antisqueezed == lv.antisqueezed);

    const SqueezeLevels mixed = jitter_average(lv, 1.0);
    CHECK(mixed.squeezed == doctest::Approx(0.152366206133).epsilon(1e-10));
    CHECK(mixed.antisqueezed == doctest::Approx(22.353233793867).epsilon(1e-10));
    CHECK(10.0 * std::log10(mixed.squeezed) == doctest::Approx(-8.171113).epsilon(1e-5));

    // The mix conserves the level sum and matches the oracle form.
    CHECK(mixed.squeezed + mixed.antisqueezed ==
          doctest::Approx(lv.squeezed + lv.antisqueezed).epsilon(1e-12));
    const auto ref = oracle::jitter_mix({lv.squeezed, lv.antisqueezed}, 1.0);
    CHECK(mixed.squeezed == doctest::Approx(ref.squeezed).epsilon(1e-13));
    CHECK(mixed.antisqueezed == doctest::Approx(ref.antisqueezed).epsilon(1e-13));

    CHECK_THROWS_AS(jitter_average(lv, -0.5), std::invalid_argument);
}

TEST_CASE("Monte Carlo jitter average cross-checks the deterministic map") {
    const SqueezeLevels lv{0.1456, 22.36};

    // Zero jitter returns the input untouched.
    const SqueezeLevels same = jitter_average_mc(lv, 0.0, 1000, 3);
    CHECK(same.squeezed == lv.squeezed);
    CHECK(same.antisqueezed == lv.antisqueezed);

    // At 1 degree RMS the Gaussian average differs from the two-point mix
    // only at O(theta^4); 200k draws resolve that to ~1e-4 absolute.
    const SqueezeLevels det = jitter_average(lv, 1.0);
    const SqueezeLevels mc = jitter_average_mc(lv, 1.0, 200000, 12345);
    CHECK(std::abs(mc.squeezed - det.squeezed) < 2e-4);
    CHECK(std::abs(mc.antisqueezed - det.antisqueezed) < 2e-4);

    // Deterministic for a fixed seed.
    const SqueezeLevels again = jitter_average_mc(lv, 1.0, 200000, 12345);
    CHECK(again.squeezed == mc.squeezed);
    CHECK(again.antisqueezed == mc.antisqueezed);
}

TEST_CASE("second arm operating point with jitter") {
    OpoParams p;
    p.pump_gain = 11.2;
    p.efficiency = 0.89;
    const SqueezeLevels mixed = jitter_average(squeezing_spectrum(p), 1.0);
    CHECK(mixed.squeezed == doctest::Approx(0.146236082).epsilon(1e-8));
    CHECK(10.0 * std::log10(mixed.squeezed) == doctest::Approx(-8.34945).epsilon(1e-5));
}

TEST_CASE("effective squeezing parameter") {
    const double s = std::pow(10.0, -0.7);
    CHECK(effective_r({s, 1.0 / s}) == doctest::Approx(0.805904782548).epsilon(1e-10));

    // Round trip through a pure level pair.
    for (double r : {0.0, 0.3, 1.2}) {
        const SqueezeLevels lv{std::exp(-2.0 * r), std::exp(2.0 * r)};
        CHECK(effective_r(lv) == doctest::Approx(r).epsilon(1e-12));
    }

    CHECK_THROWS_AS(effective_r({0.0, 5.0}), std::invalid_argument);
    CHECK_THROWS_AS(effective_r({-0.1, 5.0}), std::invalid_argument);
}
