#pragma once

#include <algorithm>

namespace bessim {

/// Configuration of the proportional power-allocation law.
struct ControllerConfig {
    /// Lower clamp on the denominator estimate (joules). Keeps the allocation
    /// total when the state estimate transiently dips toward zero.
    double denominator_floor = 1.0;
    /// +1 in discharge mode, -1 in charge mode; maps the always-positive
    /// profile magnitude onto the signed power convention (p_i > 0 discharges).
    int reference_sign = 1;

    bool operator==(const ControllerConfig&) const = default;
};

/// Result of one allocation: the commanded unit power and whether the
/// denominator floor was active.
struct Allocation {
    double watts = 0.0;
    bool floor_active = false;
};

/// p_i = x_i / max(x_hat_a_i, floor) * p_hat_a_i. Each unit draws power in
/// proportion to its share of the estimated average state, which preserves
/// the pairwise state ratios and so drives SoC balancing.
inline Allocation allocate_power(double x_i, double x_hat_a_i, double p_hat_a_i,
                                 const ControllerConfig& cfg) {
    const double denom = std::max(x_hat_a_i, cfg.denominator_floor);
    return Allocation{x_i / denom * p_hat_a_i, x_hat_a_i < cfg.denominator_floor};
}

} // namespace bessim
