#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bessim/errors.hpp"
#include "bessim/graph.hpp"

namespace bessim {

/// Time-varying gain schedule shared by both observers. The gain omega(t)
/// grows as the prespecified deadline tb approaches and would diverge at tb;
/// omega_cap bounds it so a fixed-step integrator stays stable. Convergence
/// at tb is therefore to a small residual scaling like 1/omega_cap.
struct GainSchedule {
    double t0 = 0.0;        // seconds
    double tb = 0.0;        // prespecified time, tb > t0
    double psi = 0.0;       // dimensionless, > 0
    double r = 0.0;         // dimensionless, > 0
    double omega_cap = 1.0; // >= 1

    double span() const { return tb - t0; }

    bool operator==(const GainSchedule&) const = default;
};

/// Parameters of the average-desired-power observer.
struct PowerObserverParams {
    double alpha = 0.0;      // watts/second scale of the sign term
    GainSchedule schedule;
    double sign_layer = 0.0; // boundary-layer half-width, watts; 0 = hard sign

    bool operator==(const PowerObserverParams&) const = default;
};

/// Parameters of the average-unit-state observer.
struct StateObserverParams {
    double beta = 0.0;       // joules/second scale of the sign term
    GainSchedule schedule;
    double sign_layer = 0.0; // joules; 0 = hard sign

    bool operator==(const StateObserverParams&) const = default;
};

/// Per-node estimates of the average desired power (watts).
struct PowerObserverState {
    Vector p_hat;
};

/// Internal state q and derived per-node estimates x_hat of the average unit
/// state (joules). x_hat = L*q + x holds at every round by construction.
struct StateObserverState {
    Vector q;
    Vector x_hat;
};

/// omega(t) = (tb-t0)/(tb-t) on [t0, tb), clamped at omega_cap; exactly 1 on
/// [tb, inf). Throws TimeBeforeStart for t < t0.
inline double omega(double t, const GainSchedule& g) {
    if (t < g.t0)
        throw TimeBeforeStart("omega: t=" + std::to_string(t) + " before t0=" +
                              std::to_string(g.t0));
    if (t >= g.tb) return 1.0;
    return std::min(g.omega_cap, (g.tb - g.t0) / (g.tb - t));
}

/// Sign term with optional boundary layer: hard sign (sgn(0)=0) when delta=0,
/// otherwise the saturated linear layer clamp(x/delta, -1, 1).
inline double sgn(double x, double delta) {
    if (delta == 0.0) return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    return std::clamp(x / delta, -1.0, 1.0);
}

/// Consensus signal v_i of the power observer: neighbor disagreement plus the
/// pinning term b_i*(p_hat_i - p_a). Only pinned units may be given the
/// reference; passing it to an unpinned unit (or omitting it at a pinned one)
/// is an information-locality breach and throws.
inline double power_consensus_signal(std::size_t i, std::span<const double> p_hat,
                                     const Topology& topology,
                                     std::optional<double> reference) {
    const bool pinned = topology.pinned(i);
    if (pinned && !reference)
        throw MissingReference("power_consensus_signal: unit " + std::to_string(i + 1) +
                               " is pinned but no reference was supplied");
    if (!pinned && reference)
        throw ForbiddenReference("power_consensus_signal: unit " + std::to_string(i + 1) +
                                 " is not pinned but a reference was supplied");
    double v = 0.0;
    for (std::size_t j : topology.neighbors(i)) v += p_hat[i] - p_hat[j];
    if (pinned) v += p_hat[i] - *reference;
    return v;
}

/// dp_hat/dt for one node given its consensus signal.
inline double power_observer_derivative(double v_i, double t, const PowerObserverParams& p) {
    const GainSchedule& g = p.schedule;
    return -p.alpha * sgn(v_i, p.sign_layer) - g.psi * (g.r / g.span()) * omega(t, g) * v_i;
}

/// Consensus signal xi_i of the state observer: the Laplacian row applied to
/// the current estimates. Sums to zero over the fleet for any input.
inline double state_consensus_signal(std::size_t i, std::span<const double> x_hat,
                                     const Topology& topology) {
    double xi = 0.0;
    for (std::size_t j : topology.neighbors(i)) xi += x_hat[i] - x_hat[j];
    return xi;
}

/// dq/dt for one node given its consensus signal.
inline double state_observer_q_derivative(double xi_i, double t, const StateObserverParams& p) {
    const GainSchedule& g = p.schedule;
    return -p.beta * sgn(xi_i, p.sign_layer) - g.psi * (g.r / g.span()) * omega(t, g) * xi_i;
}

/// Per-node estimates x_hat = L*q + x. Adding a constant to all q leaves the
/// result unchanged; the estimates always sum to the true state total.
inline Vector state_estimates(std::span<const double> q, std::span<const double> x,
                              const Topology& topology) {
    const std::size_t n = topology.size();
    Vector x_hat(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = x[i];
        for (std::size_t j : topology.neighbors(i)) acc += q[i] - q[j];
        x_hat[i] = acc;
    }
    return x_hat;
}

} // namespace bessim
