#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgesim/reservation.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {
// raw update arithmetic: unit latency scale, drift as printed in the update rule
ReservationState raw_state() {
    ReservationState s;
    s.latency_scale = 1.0;
    s.drift = DriftMode::AsPrinted;
    s.l_max_ms = 500.0;
    return s;
}
}  // namespace

TEST_CASE("raw update arithmetic with a slack constraint") {
    ReservationState s = raw_state();
    s.x = {0.5, 0.5, 0.5};
    s.lambda = 0.0;
    const ReservationState next = update_reservation(s, {0.0, 0.0, 0.0}, 400.0);
    // lambda stays at zero and every coordinate drifts by +eta1
    CHECK(next.lambda == 0.0);
    for (int m = 0; m < 3; ++m) CHECK(next.x(m) == doctest::Approx(0.5 + 0.02));
}

TEST_CASE("coordinates clip at the upper bound") {
    ReservationState s = raw_state();
    s.x = {1.0, 1.0, 1.0};
    const ReservationState next = update_reservation(s, {0.0, 0.0, 0.0}, 100.0);
    for (int m = 0; m < 3; ++m) CHECK(next.x(m) == 1.0);
}

TEST_CASE("raw update matches the componentwise arithmetic") {
    ReservationState s = raw_state();
    s.x = {0.5, 0.5, 0.5};
    s.lambda = 2.0;
    const ReservationState next = update_reservation(s, {10.0, 0.0, 0.0}, 500.0);
    // delta = 0.02 * (1 - 2*10, 1, 1) = (-0.38, 0.02, 0.02)
    CHECK(next.x(0) == doctest::Approx(0.5 - 0.38));
    CHECK(next.x(1) == doctest::Approx(0.5 + 0.02));
    CHECK(next.x(2) == doctest::Approx(0.5 + 0.02));
}

TEST_CASE("descent mode reverses the constant drift") {
    ReservationState s = raw_state();
    s.drift = DriftMode::Descent;
    s.x = {0.5, 0.5, 0.5};
    s.lambda = 0.0;
    const ReservationState next = update_reservation(s, {0.0, 0.0, 0.0}, 400.0);
    for (int m = 0; m < 3; ++m) CHECK(next.x(m) == doctest::Approx(0.5 - 0.02));
    // a binding constraint with a negative latency gradient pushes X back up
    ReservationState tight = s;
    tight.lambda = 100.0;
    const ReservationState up = update_reservation(tight, {-10.0, -10.0, -10.0}, 600.0);
    for (int m = 0; m < 3; ++m) CHECK(up.x(m) > tight.x(m));
}

TEST_CASE("the multiplier accumulates constraint violations and projects at zero") {
    ReservationState s = raw_state();
    s.lambda = 0.0;
    // slack: stays at zero
    CHECK(update_reservation(s, {0, 0, 0}, 499.9).lambda == 0.0);
    CHECK(update_reservation(s, {0, 0, 0}, 500.0).lambda == 0.0);
    // violation: strictly increases
    const double l1 = update_reservation(s, {0, 0, 0}, 600.0).lambda;
    CHECK(l1 == doctest::Approx(0.02 * 100.0));
    // deep slack from a positive multiplier: projected at zero
    s.lambda = 0.5;
    CHECK(update_reservation(s, {0, 0, 0}, 0.0).lambda == 0.0);
}

TEST_CASE("the latency scale divides both residual and gradient") {
    ReservationState s = raw_state();
    s.latency_scale = 500.0;
    s.lambda = 1.0;
    s.x = {0.5, 0.5, 0.5};
    const ReservationState next = update_reservation(s, {500.0, 0.0, 0.0}, 750.0);
    // gradient term: eta1 * (1 - lambda * 500/500) = 0 on coordinate 0
    CHECK(next.x(0) == doctest::Approx(0.5));
    CHECK(next.lambda == doctest::Approx(1.0 + 0.02 * (750.0 - 500.0) / 500.0));
}

TEST_CASE("non-finite gradients are rejected") {
    ReservationState s = raw_state();
    const Eigen::Vector3d bad{std::nan(""), 0.0, 0.0};
    CHECK_THROWS_AS(update_reservation(s, bad, 100.0), std::invalid_argument);
}

TEST_CASE("dual feasibility and box constraints hold for random states") {
    RngStream rng(31);
    for (int i = 0; i < 10000; ++i) {
        ReservationState s;
        s.drift = (i % 2 == 0) ? DriftMode::Descent : DriftMode::AsPrinted;
        s.latency_scale = (i % 3 == 0) ? 1.0 : 500.0;
        s.x = {rng.uniform(), rng.uniform(), rng.uniform()};
        s.lambda = rng.uniform(0.0, 5.0);
        const Eigen::Vector3d g{rng.uniform(-2000, 2000), rng.uniform(-2000, 2000),
                                rng.uniform(-2000, 2000)};
        const double lh = rng.uniform(0.0, 1500.0);
        const ReservationState next = update_reservation(s, g, lh);
        CHECK(next.lambda >= 0.0);
        for (int m = 0; m < 3; ++m) {
            CHECK(next.x(m) >= 0.0);
            CHECK(next.x(m) <= 1.0);
        }
    }
}

TEST_CASE("observe_window returns the maximum latency") {
    CHECK(observe_window({320.0, 495.0, 410.0}) == 495.0);
    CHECK(observe_window({123.0}) == 123.0);
    CHECK_THROWS_AS(observe_window({}), std::invalid_argument);
}
