#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "bessim/errors.hpp"

namespace bessim {

/// Kind tag of a desired-power profile. Profiles yield the demand magnitude
/// in watts; the controller's reference sign maps it to charge or discharge.
enum class ProfileKind { Case1Sinusoid, Case2Piecewise, Constant, PiecewiseCustom };

inline const char* to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Case1Sinusoid: return "case1_sinusoid";
        case ProfileKind::Case2Piecewise: return "case2_piecewise";
        case ProfileKind::Constant: return "constant";
        case ProfileKind::PiecewiseCustom: return "piecewise";
    }
    return "?";
}

/// One piecewise segment on [t_start, t_end), evaluated in absolute time.
struct Segment {
    enum class Shape { Constant, Linear, Sinusoid };

    double t_start = 0.0;
    double t_end = 0.0;
    Shape shape = Shape::Constant;
    double value = 0.0;     // Constant
    double intercept = 0.0; // Linear: intercept + slope*t
    double slope = 0.0;
    double offset = 0.0;    // Sinusoid: offset + amplitude*sin(omega*t + phase)
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;

    double evaluate(double t) const {
        switch (shape) {
            case Shape::Constant: return value;
            case Shape::Linear: return intercept + slope * t;
            case Shape::Sinusoid: return offset + amplitude * std::sin(omega * t + phase);
        }
        return 0.0;
    }

    double derivative(double t) const {
        switch (shape) {
            case Shape::Constant: return 0.0;
            case Shape::Linear: return slope;
            case Shape::Sinusoid: return amplitude * omega * std::cos(omega * t + phase);
        }
        return 0.0;
    }

    bool operator==(const Segment&) const = default;
};

/// Desired-power profile p*(t), always a magnitude (>= 0 expected).
struct PowerProfile {
    ProfileKind kind = ProfileKind::Constant;

    // Case1Sinusoid: offset + amplitude*sin(omega*t); Constant: offset.
    double offset = 0.0;
    double amplitude = 0.0;
    double omega = 1.0;

    // Piecewise kinds.
    std::vector<Segment> segments;
    bool replay = false;         // repeat the segment pattern periodically
    bool hold_after_end = true;  // past the last segment, hold its terminal value

    double pattern_end() const { return segments.empty() ? 0.0 : segments.back().t_end; }

    bool operator==(const PowerProfile&) const = default;
};

inline PowerProfile case1_sinusoid(double amplitude = 4200.0, double offset = 4200.0,
                                   double omega = 1.0) {
    PowerProfile p;
    p.kind = ProfileKind::Case1Sinusoid;
    p.amplitude = amplitude;
    p.offset = offset;
    p.omega = omega;
    return p;
}

inline PowerProfile constant_profile(double watts) {
    PowerProfile p;
    p.kind = ProfileKind::Constant;
    p.offset = watts;
    return p;
}

inline void validate_segments(const std::vector<Segment>& segments) {
    if (segments.empty()) throw Error("piecewise profile has no segments");
    if (segments.front().t_start != 0.0)
        throw Error("piecewise profile must start at t=0");
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (!(segments[k].t_end > segments[k].t_start))
            throw Error("piecewise segment " + std::to_string(k + 1) + " has empty span");
        if (k + 1 < segments.size() && segments[k].t_end != segments[k + 1].t_start)
            throw Error("piecewise segments must be contiguous (gap after segment " +
                        std::to_string(k + 1) + ")");
    }
}

inline PowerProfile piecewise_custom(std::vector<Segment> segments, bool replay = false,
                                     bool hold_after_end = true) {
    validate_segments(segments);
    PowerProfile p;
    p.kind = ProfileKind::PiecewiseCustom;
    p.segments = std::move(segments);
    p.replay = replay;
    p.hold_after_end = hold_after_end;
    return p;
}

/// The four-segment staircase demand pattern on [0,1): constant, sinusoid
/// burst, rising ramp, falling ramp. With replay=true the pattern repeats
/// every second.
inline PowerProfile case2_piecewise(bool replay = false, bool hold_after_end = true) {
    std::vector<Segment> seg(4);
    seg[0] = Segment{.t_start = 0.0, .t_end = 0.25, .shape = Segment::Shape::Constant,
                     .value = 1000.0};
    seg[1] = Segment{.t_start = 0.25, .t_end = 0.5, .shape = Segment::Shape::Sinusoid,
                     .offset = 2000.0, .amplitude = 1500.0, .omega = 5.0, .phase = 0.0};
    seg[2] = Segment{.t_start = 0.5, .t_end = 0.75, .shape = Segment::Shape::Linear,
                     .intercept = 0.0, .slope = 5000.0};
    seg[3] = Segment{.t_start = 0.75, .t_end = 1.0, .shape = Segment::Shape::Linear,
                     .intercept = 6000.0, .slope = -4000.0};
    PowerProfile p;
    p.kind = ProfileKind::Case2Piecewise;
    p.segments = std::move(seg);
    p.replay = replay;
    p.hold_after_end = hold_after_end;
    return p;
}

/// p*(t) magnitude at time t >= 0. Past the last piecewise segment the
/// profile either holds its terminal value (hold_after_end), replays, or is
/// out of domain.
inline double desired_power(const PowerProfile& profile, double t) {
    if (t < 0.0) throw OutOfDomain("desired_power: t must be nonnegative");
    switch (profile.kind) {
        case ProfileKind::Case1Sinusoid:
            return profile.offset + profile.amplitude * std::sin(profile.omega * t);
        case ProfileKind::Constant:
            return profile.offset;
        case ProfileKind::Case2Piecewise:
        case ProfileKind::PiecewiseCustom:
            break;
    }
    const double end = profile.pattern_end();
    double tau = t;
    if (profile.replay && end > 0.0) {
        tau = std::fmod(t, end);
    } else if (t >= end) {
        if (!profile.hold_after_end)
            throw OutOfDomain("desired_power: t=" + std::to_string(t) +
                              " past profile end " + std::to_string(end));
        return profile.segments.back().evaluate(end);
    }
    for (const Segment& s : profile.segments)
        if (tau >= s.t_start && tau < s.t_end) return s.evaluate(tau);
    return profile.segments.back().evaluate(end);
}

/// Bounds of a profile over [0, horizon]: magnitude range [p_low, p_high] and
/// the rate bound eps = sup|dp*/dt|. eps is +inf when the profile has jump
/// discontinuities; their locations (within one pattern) are listed.
struct ProfileBounds {
    double p_low = 0.0;
    double p_high = 0.0;
    double eps = 0.0;
    std::vector<double> jump_times;

    bool has_jumps() const { return !jump_times.empty(); }
};

namespace detail {

/// Range of offset + amplitude*sin(omega*t + phase) over [a, b].
inline std::pair<double, double> sinusoid_range(double offset, double amplitude, double omega,
                                                double phase, double a, double b) {
    double lo = std::min(offset + amplitude * std::sin(omega * a + phase),
                         offset + amplitude * std::sin(omega * b + phase));
    double hi = std::max(offset + amplitude * std::sin(omega * a + phase),
                         offset + amplitude * std::sin(omega * b + phase));
    if (omega != 0.0) {
        // Interior critical points: omega*t + phase = pi/2 + k*pi.
        const double pi = std::numbers::pi;
        const double k0 = std::ceil((omega * a + phase - pi / 2.0) / pi);
        for (double k = k0;; k += 1.0) {
            const double t = (pi / 2.0 + k * pi - phase) / omega;
            if (t > b) break;
            if (t >= a) {
                const double v = offset + amplitude * std::sin(omega * t + phase);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    return {lo, hi};
}

/// sup of |amplitude*omega*cos(omega*t + phase)| over [a, b].
inline double sinusoid_rate_sup(double amplitude, double omega, double phase, double a,
                                double b) {
    double sup = std::max(std::abs(amplitude * omega * std::cos(omega * a + phase)),
                          std::abs(amplitude * omega * std::cos(omega * b + phase)));
    if (omega != 0.0) {
        // |cos| peaks where omega*t + phase = k*pi.
        const double pi = std::numbers::pi;
        const double k0 = std::ceil((omega * a + phase) / pi);
        for (double k = k0;; k += 1.0) {
            const double t = (k * pi - phase) / omega;
            if (t > b) break;
            if (t >= a) sup = std::abs(amplitude * omega);
        }
    }
    return sup;
}

inline std::pair<double, double> segment_range(const Segment& s, double a, double b) {
    switch (s.shape) {
        case Segment::Shape::Constant:
            return {s.value, s.value};
        case Segment::Shape::Linear: {
            const double va = s.evaluate(a), vb = s.evaluate(b);
            return {std::min(va, vb), std::max(va, vb)};
        }
        case Segment::Shape::Sinusoid:
            return sinusoid_range(s.offset, s.amplitude, s.omega, s.phase, a, b);
    }
    return {0.0, 0.0};
}

inline double segment_rate_sup(const Segment& s, double a, double b) {
    switch (s.shape) {
        case Segment::Shape::Constant: return 0.0;
        case Segment::Shape::Linear: return std::abs(s.slope);
        case Segment::Shape::Sinusoid:
            return sinusoid_rate_sup(s.amplitude, s.omega, s.phase, a, b);
    }
    return 0.0;
}

} // namespace detail

inline ProfileBounds profile_bounds(const PowerProfile& profile, double horizon) {
    ProfileBounds out;
    if (profile.kind == ProfileKind::Constant) {
        out.p_low = out.p_high = std::abs(profile.offset);
        out.eps = 0.0;
        return out;
    }
    if (profile.kind == ProfileKind::Case1Sinusoid) {
        auto [lo, hi] = detail::sinusoid_range(profile.offset, profile.amplitude,
                                               profile.omega, 0.0, 0.0, horizon);
        out.p_low = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
        out.p_high = std::max(std::abs(lo), std::abs(hi));
        out.eps = detail::sinusoid_rate_sup(profile.amplitude, profile.omega, 0.0, 0.0, horizon);
        return out;
    }

    // Piecewise kinds: segment-by-segment analytic bounds over one pattern,
    // clipped to the horizon when the pattern is not replayed.
    const double end = profile.pattern_end();
    const double clip = profile.replay ? end : std::min(horizon, end);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double rate = 0.0;
    const double jump_tol = 1e-9;
    for (std::size_t k = 0; k < profile.segments.size(); ++k) {
        const Segment& s = profile.segments[k];
        const double a = s.t_start;
        const double b = std::min(s.t_end, clip);
        if (b <= a) break;
        auto [slo, shi] = detail::segment_range(s, a, b);
        lo = std::min(lo, slo);
        hi = std::max(hi, shi);
        rate = std::max(rate, detail::segment_rate_sup(s, a, b));
        // Jump against the next segment (or the wrap-around when replaying).
        const bool last = k + 1 == profile.segments.size();
        if (s.t_end > clip) continue;
        if (!last) {
            const Segment& nxt = profile.segments[k + 1];
            const double left = s.evaluate(s.t_end);
            const double right = nxt.evaluate(nxt.t_start);
            if (std::abs(left - right) > jump_tol * std::max({1.0, std::abs(left), std::abs(right)}))
                out.jump_times.push_back(s.t_end);
        } else if (profile.replay && horizon > end) {
            const double left = s.evaluate(end);
            const double right = profile.segments.front().evaluate(0.0);
            if (std::abs(left - right) > jump_tol * std::max({1.0, std::abs(left), std::abs(right)}))
                out.jump_times.push_back(end);
        }
    }
    if (!profile.replay && profile.hold_after_end && horizon > end) {
        const double held = profile.segments.back().evaluate(end);
        lo = std::min(lo, held);
        hi = std::max(hi, held);
    }
    out.p_low = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    out.p_high = std::max(std::abs(lo), std::abs(hi));
    out.eps = out.has_jumps() ? std::numeric_limits<double>::infinity() : rate;
    return out;
}

} // namespace bessim
