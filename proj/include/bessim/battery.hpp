#pragma once

#include <string>

#include "bessim/errors.hpp"

namespace bessim {

/// Operating mode, fixed for a whole run.
enum class Mode { Discharging, Charging };

inline const char* to_string(Mode m) {
    return m == Mode::Discharging ? "discharging" : "charging";
}

/// One battery unit under Coulomb counting. Internal units are strict SI:
/// capacity in coulombs, voltage in volts, so the unit state C*V*s comes out
/// in joules and the power bookkeeping balances dimensionally.
struct BatteryUnit {
    double capacity_coulombs = 0.0;
    double voltage = 0.0;
    double soc = 0.0; // dimensionless, in [0,1]
    Mode mode = Mode::Discharging;

    double energy_capacity() const { return capacity_coulombs * voltage; } // joules

    bool operator==(const BatteryUnit&) const = default;
};

/// Fleet-wide bounds a1 <= x_i <= a2 on the unit state, in joules.
struct StateBounds {
    double a1 = 0.0;
    double a2 = 0.0;

    bool operator==(const StateBounds&) const = default;
};

/// Builds a unit from scenario-file quantities (capacity in amp-hours).
inline BatteryUnit unit_from_config(double capacity_amp_hours, double voltage,
                                    double initial_soc, Mode mode) {
    if (!(capacity_amp_hours > 0.0))
        throw NonPositiveCapacity("capacity must be positive, got " +
                                  std::to_string(capacity_amp_hours) + " Ah");
    if (!(voltage > 0.0))
        throw Error("voltage must be positive, got " + std::to_string(voltage) + " V");
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0))
        throw SocOutOfRange("initial SoC must lie in [0,1], got " +
                            std::to_string(initial_soc));
    return BatteryUnit{capacity_amp_hours * 3600.0, voltage, initial_soc, mode};
}

/// Unit state x_i in joules: the dischargeable energy C*V*s when discharging,
/// the remaining headroom C*V*(1-s) when charging.
inline double unit_state(const BatteryUnit& u) {
    return u.mode == Mode::Discharging ? u.energy_capacity() * u.soc
                                       : u.energy_capacity() * (1.0 - u.soc);
}

/// dx/dt in joules per second for output power p_i (watts): -p_i when
/// discharging, +p_i when charging.
inline double state_derivative(const BatteryUnit& u, double p_i) {
    return u.mode == Mode::Discharging ? -p_i : p_i;
}

/// One explicit-Euler SoC step: soc' = soc - h*p_i/(C*V). Throws SocOutOfRange
/// when the step would leave [0,1].
inline BatteryUnit soc_step(const BatteryUnit& u, double p_i, double h) {
    BatteryUnit next = u;
    next.soc = u.soc - h * p_i / u.energy_capacity();
    if (!(next.soc >= 0.0 && next.soc <= 1.0))
        throw SocOutOfRange("SoC left [0,1]: " + std::to_string(next.soc));
    return next;
}

} // namespace bessim
