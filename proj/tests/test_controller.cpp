#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bessim/controller.hpp"

using namespace bessim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("allocate_power proportional law", "[controller]") {
    const ControllerConfig cfg{1.0, +1};

    SECTION("a unit sitting at the average gets the average power") {
        const Allocation a = allocate_power(1e6, 1e6, 700.0, cfg);
        CHECK_THAT(a.watts, WithinRel(700.0, 1e-12));
        CHECK_FALSE(a.floor_active);
    }
    SECTION("unit above the average draws proportionally more") {
        // Six-unit fleet, 15.84 MJ capacity, mean SoC 0.9033...
        const double x_i = 15048000.0;
        const double x_a = 15840000.0 * (5.42 / 6.0);
        const Allocation a = allocate_power(x_i, x_a, 700.0, cfg);
        CHECK_THAT(a.watts, WithinRel(x_i / x_a * 700.0, 1e-12));
        CHECK_THAT(a.watts, WithinAbs(736.1623616236162, 1e-6));
    }
    SECTION("floor guards a vanishing denominator") {
        const Allocation a = allocate_power(5.0, 0.0, 2.0, cfg);
        CHECK_THAT(a.watts, WithinRel(10.0, 1e-12));
        CHECK(a.floor_active);
    }
}

TEST_CASE("exact-estimate allocation sums to the total demand", "[controller]") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> state(1e5, 2e7);
    std::uniform_real_distribution<double> demand(-9000.0, 9000.0);
    const ControllerConfig cfg{1.0, +1};
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng() % 9;
        std::vector<double> x(n);
        double x_a = 0.0;
        for (auto& v : x) {
            v = state(rng);
            x_a += v;
        }
        x_a /= double(n);
        const double p_star = demand(rng);
        double sum = 0.0;
        for (double xi : x) sum += allocate_power(xi, x_a, p_star / double(n), cfg).watts;
        CHECK_THAT(sum, WithinAbs(p_star, 1e-9 * std::max(1.0, std::abs(p_star))));
    }
}

TEST_CASE("homogeneity: scaling states and estimate together changes nothing",
          "[controller]") {
    const ControllerConfig cfg{1e-9, +1};
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> state(1.0, 100.0);
    std::uniform_real_distribution<double> scale(0.5, 20.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double x = state(rng), x_hat = state(rng), c = scale(rng);
        const double base = allocate_power(x, x_hat, 123.0, cfg).watts;
        const double scaled = allocate_power(c * x, c * x_hat, 123.0, cfg).watts;
        CHECK_THAT(scaled, WithinRel(base, 1e-12));
    }
}

TEST_CASE("positivity in discharge mode", "[controller]") {
    const ControllerConfig cfg{1.0, +1};
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> state(1e3, 1e7);
    std::uniform_real_distribution<double> demand(1.0, 9000.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Allocation a = allocate_power(state(rng), state(rng), demand(rng), cfg);
        CHECK(a.watts > 0.0);
    }
}
