#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvqt/calibration.hpp"

#include <cmath>
#include <stdexcept>

using namespace cvqt;

TEST_CASE("gain bound from measured suppression") {
    CHECK(gain_bound_from_suppression(37.4) ==
          doctest::Approx(0.01348962882591654).epsilon(1e-14));
    CHECK(gain_bound_from_suppression(37.0) ==
          doctest::Approx(0.01412537544622754).epsilon(1e-14));
    CHECK(gain_bound_from_suppression(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gain_bound_from_suppression(20.0) == doctest::Approx(0.1).epsilon(1e-14));

    CHECK_THROWS_AS(gain_bound_from_suppression(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(gain_bound_from_suppression(std::nan("")), std::invalid_argument);
}

TEST_CASE("classical noise floor from an actual run") {
    CHECK(std::abs(classical_floor() - 3.0) < 1e-12);
}

TEST_CASE("simulated cancellation at slightly wrong gain") {
    // |g - 1| = 0.01 leaves a residual 40 dB below the unsuppressed tone.
    const CancellationResult r = simulate_cancellation(0.99, 0.99, 1000.0);
    CHECK_FALSE(r.x_at_floor);
    CHECK_FALSE(r.p_at_floor);
    CHECK(r.suppression_x_db == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(r.suppression_p_db == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(r.gain_bound_x == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(r.gain_bound_p == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("simulated cancellation at exact unity gain hits the floor") {
    const CancellationResult r = simulate_cancellation(1.0, 1.0, 1000.0);
    CHECK(r.x_at_floor);
    CHECK(r.p_at_floor);
    CHECK(r.suppression_x_db == kSuppressionFloorCapDb);
    CHECK(r.suppression_p_db == kSuppressionFloorCapDb);
    CHECK(r.gain_bound_x == doctest::Approx(std::pow(10.0, -kSuppressionFloorCapDb / 20.0)));
}

TEST_CASE("simulated cancellation treats the quadratures independently") {
    const CancellationResult r = simulate_cancellation(1.0, 0.98, 500.0);
    CHECK(r.x_at_floor);
    CHECK_FALSE(r.p_at_floor);
    CHECK(r.suppression_p_db == doctest::Approx(-20.0 * std::log10(0.02)).epsilon(1e-9));
    CHECK(r.gain_bound_p == doctest::Approx(0.02).epsilon(1e-9));

    CHECK_THROWS_AS(simulate_cancellation(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_cancellation(1.0, 1.0, -5.0), std::invalid_argument);
}

TEST_CASE("cancellation round-trips the configured gain error") {
    for (double g : {0.95, 0.99, 1.02, 1.1}) {
        const CancellationResult r = simulate_cancellation(g, g, 2000.0);
        CHECK(r.gain_bound_x == doctest::Approx(std::abs(g - 1.0)).epsilon(1e-9));
        CHECK(r.gain_bound_p == doctest::Approx(std::abs(g - 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("stepped-attenuator gain quantisation") {
    // Unity gain is 0 dB attenuation: every grid keeps it exact.
    CHECK(quantize_gain(1.0, 0.1) == 1.0);
    CHECK(quantize_gain(0.0, 0.1) == 0.0);

    // 1.007 is 0.06 dB above unity; the nearest 0.1 dB step is 0.1 dB.
    CHECK(quantize_gain(1.007, 0.1) == doctest::Approx(std::pow(10.0, 0.1 / 20.0)).epsilon(1e-12));
    // 0.99 is -0.087 dB; snaps to -0.1 dB.
    CHECK(quantize_gain(0.99, 0.1) ==
          doctest::Approx(std::pow(10.0, -0.1 / 20.0)).epsilon(1e-12));
    // Already on the grid: idempotent (up to round-off).
    const double snapped = quantize_gain(0.93, 0.25);
    CHECK(quantize_gain(snapped, 0.25) == doctest::Approx(snapped).epsilon(1e-12));

    // A coarse grid pulls small deviations back to unity.
    CHECK(quantize_gain(1.02, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(quantize_gain(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quantize_gain(1.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(quantize_gain(-1.0, 0.1), std::invalid_argument);
}
