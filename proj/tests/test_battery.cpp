#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bessim/battery.hpp"

using namespace bessim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("unit_from_config converts amp-hours to coulombs", "[battery]") {
    const BatteryUnit u = unit_from_config(220.0, 20.0, 0.95, Mode::Discharging);
    CHECK(u.capacity_coulombs == 792000.0);
    CHECK(u.voltage == 20.0);
    CHECK(u.soc == 0.95);

    const BatteryUnit tiny = unit_from_config(1.0, 1.0, 0.0, Mode::Charging);
    CHECK(tiny.capacity_coulombs == 3600.0);

    CHECK_THROWS_AS(unit_from_config(-5.0, 20.0, 0.5, Mode::Discharging), NonPositiveCapacity);
    CHECK_THROWS_AS(unit_from_config(0.0, 20.0, 0.5, Mode::Discharging), NonPositiveCapacity);
    CHECK_THROWS_AS(unit_from_config(220.0, 20.0, 1.3, Mode::Discharging), SocOutOfRange);
    CHECK_THROWS_AS(unit_from_config(220.0, -1.0, 0.5, Mode::Discharging), Error);
}

TEST_CASE("unit_state in both modes", "[battery]") {
    BatteryUnit u{792000.0, 20.0, 0.95, Mode::Discharging};
    CHECK_THAT(unit_state(u), WithinRel(15048000.0, 1e-12));

    u.soc = 1.0;
    CHECK(unit_state(u) == u.energy_capacity());

    u.mode = Mode::Charging;
    CHECK(unit_state(u) == 0.0);
}

TEST_CASE("mode duality: charging state is the complement", "[battery]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> soc(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        BatteryUnit u{792000.0, 20.0, soc(rng), Mode::Discharging};
        BatteryUnit c = u;
        c.mode = Mode::Charging;
        CHECK_THAT(unit_state(u) + unit_state(c), WithinRel(u.energy_capacity(), 1e-12));
    }
}

TEST_CASE("state_derivative sign rule", "[battery]") {
    BatteryUnit u{792000.0, 20.0, 0.5, Mode::Discharging};
    CHECK(state_derivative(u, 700.0) == -700.0);
    u.mode = Mode::Charging;
    CHECK(state_derivative(u, -700.0) == -700.0);
    CHECK(state_derivative(u, 0.0) == 0.0);
}

TEST_CASE("soc_step explicit Euler update", "[battery]") {
    const BatteryUnit u{792000.0, 20.0, 0.95, Mode::Discharging};
    const BatteryUnit next = soc_step(u, 15840000.0, 0.1);
    CHECK_THAT(next.soc, WithinAbs(0.85, 1e-15));

    CHECK(soc_step(u, 0.0, 1.0).soc == u.soc);

    const BatteryUnit nearly_empty{792000.0, 20.0, 0.0001, Mode::Discharging};
    CHECK_THROWS_AS(soc_step(nearly_empty, 1e6, 10.0), SocOutOfRange);
}

TEST_CASE("energy bookkeeping: C*V*dsoc equals -h*p", "[battery]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> power(-500.0, 500.0);
    const double h = 1e-3;
    for (int rep = 0; rep < 50; ++rep) {
        const BatteryUnit u{792000.0, 20.0, 0.5, Mode::Discharging};
        const double p = power(rng);
        const BatteryUnit next = soc_step(u, p, h);
        // A few ulps of C*V*soc (~1.8e-9 each) is the attainable accuracy.
        const double lhs = u.energy_capacity() * (next.soc - u.soc);
        CHECK_THAT(lhs, WithinAbs(-h * p, 1e-8));
        // Equivalently dx = h * state_derivative in discharge mode.
        CHECK_THAT(unit_state(next) - unit_state(u), WithinAbs(h * state_derivative(u, p), 1e-8));
    }
}

TEST_CASE("soc_step is linear in power for fixed h", "[battery]") {
    const BatteryUnit u{792000.0, 20.0, 0.5, Mode::Discharging};
    const double h = 0.01;
    const double d1 = soc_step(u, 100.0, h).soc - u.soc;
    const double d2 = soc_step(u, 200.0, h).soc - u.soc;
    const double d3 = soc_step(u, 300.0, h).soc - u.soc;
    // Deltas are differences of numbers near 0.5, so allow ulp(0.5)-scale slack.
    CHECK_THAT(d2, WithinAbs(2.0 * d1, 1e-12));
    CHECK_THAT(d3, WithinAbs(3.0 * d1, 1e-12));
}
