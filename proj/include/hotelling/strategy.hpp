#pragma once

// The optimal bang-bang strategy: consume at the Hotelling rate while R > R*(x); on reaching the
// frontier, explore in zero time until a find lifts reserves above R*(x) or the area runs out.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string_view>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/model.hpp"
#include "hotelling/rng.hpp"
#include "hotelling/solver.hpp"

namespace hotelling {

enum class EventKind { ConsumptionStart, ExplorationEpisode, Exhaustion };

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::ConsumptionStart: return "ConsumptionStart";
        case EventKind::ExplorationEpisode: return "ExplorationEpisode";
        case EventKind::Exhaustion: return "Exhaustion";
    }
    return "?";
}

struct PathEvent {
    EventKind kind = EventKind::ConsumptionStart;
    double time = 0.0;
    double x_before = 0.0;
    double x_after = 0.0;
    double r_before = 0.0;
    double r_after = 0.0;
    int finds = 0;
    double price_before = 0.0;
    double price_after = 0.0;
    double cost = 0.0;             ///< k e^{-r t} (x_before - x_after)
    std::vector<double> spacings;  ///< exponential draws in explored distance, in order
};

/// Consumption at c(t) = c0 e^{-r t/(1-alpha)} from (x, r_start) until reserves fall to r_end.
struct ConsumptionSegment {
    double start_time = 0.0;
    double duration = 0.0;  ///< +inf for the terminal Hotelling segment
    double x = 0.0;
    double r_start = 0.0;
    double r_end = 0.0;  ///< frontier level reached at the end (0 when duration is infinite)
    double c0 = 0.0;
    double price0 = 0.0;  ///< shadow price at the start, c0^{alpha-1}

    double end_time() const { return start_time + duration; }

    double reserves_after(const ModelParams& p, double tau) const {
        if (std::isinf(tau)) return r_start - (1.0 - p.alpha) / p.r * c0;
        return r_start + (1.0 - p.alpha) / p.r * c0 * std::expm1(-p.r * tau / (1.0 - p.alpha));
    }
    double price_after(const ModelParams& p, double tau) const { return price0 * std::exp(p.r * tau); }
    double consumption_after(const ModelParams& p, double tau) const {
        return c0 * std::exp(-p.r * tau / (1.0 - p.alpha));
    }
};

struct Path {
    ModelParams params;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    double x0 = 0.0;
    double r0 = 0.0;
    double horizon = 0.0;
    std::vector<PathEvent> events;
    std::vector<ConsumptionSegment> segments;
    std::optional<double> exhaustion_time;  ///< empty: not exhausted within the horizon

    double total_discounted_cost() const {
        double total = 0.0;
        for (const auto& e : events) total += e.cost;
        return total;
    }
    int total_finds() const {
        int n = 0;
        for (const auto& e : events) n += e.finds;
        return n;
    }
};

struct SimulationOptions {
    double horizon = 100.0;
    /// Multiplies R*(x) in the stopping rule. 1 is the optimal strategy; other values give a
    /// deliberately mis-specified strategy for negative controls.
    double frontier_scale = 1.0;
};

namespace detail {

inline double strategy_frontier(const ValueSurface& s, double x, double scale) {
    return scale * s.frontier_at(x);
}

inline double price_or_inf(const ValueSurface& s, double x, double R) {
    if (!(R > 0.0)) return std::numeric_limits<double>::infinity();
    if (x == 0.0) return hotelling_price(s.params(), R);
    return s.price_at(x, R);
}

}  // namespace detail

/// Hotelling consumption from (x, R_start) until reserves reach the frontier. Infinite when x = 0.
inline ConsumptionSegment consumption_segment(const ValueSurface& s, double x, double R_start, double start_time = 0.0,
                                              double frontier_scale = 1.0) {
    const auto& p = s.params();
    ConsumptionSegment seg;
    seg.start_time = start_time;
    seg.x = x;
    seg.r_start = R_start;
    const double r_front = x > 0.0 ? detail::strategy_frontier(s, x, frontier_scale) : 0.0;
    if (x > 0.0 && R_start < r_front) {
        std::ostringstream msg;
        msg << "consumption_segment: R = " << R_start << " lies below the frontier " << r_front << " at x = " << x;
        throw RegionError(msg.str());
    }
    seg.price0 = detail::price_or_inf(s, x, R_start);
    seg.c0 = std::isinf(seg.price0) ? 0.0 : std::pow(seg.price0, 1.0 / (p.alpha - 1.0));
    const double arg = -(R_start - r_front) * p.r / ((1.0 - p.alpha) * seg.c0);
    if (x == 0.0 || !(arg > -1.0)) {
        seg.duration = std::numeric_limits<double>::infinity();
        seg.r_end = 0.0;
    } else {
        seg.duration = -(1.0 - p.alpha) / p.r * std::log1p(arg);
        seg.r_end = r_front;
    }
    return seg;
}

/// Zero-time exploration from (x, R) with R at or below the frontier. price_before defaults to the
/// shadow price at (x, R).
inline PathEvent exploration_episode(const ValueSurface& s, double x, double R, RngStream& rng, double time = 0.0,
                                     double frontier_scale = 1.0,
                                     std::optional<double> price_before = std::nullopt) {
    const auto& p = s.params();
    if (!(x > 0.0)) throw RegionError("exploration_episode: no unexplored area left");
    PathEvent ev;
    ev.kind = EventKind::ExplorationEpisode;
    ev.time = time;
    ev.x_before = x;
    ev.r_before = R;
    ev.price_before = price_before ? *price_before : detail::price_or_inf(s, x, R);
    double xc = x;
    double rc = R;
    while (true) {
        const double spacing = rng.exponential(p.lambda);
        ev.spacings.push_back(spacing);
        if (spacing < xc) {
            xc -= spacing;
            rc += p.a;
            ++ev.finds;
            if (rc > detail::strategy_frontier(s, xc, frontier_scale)) break;
        } else {
            xc = 0.0;
            ev.kind = EventKind::Exhaustion;
            break;
        }
    }
    ev.x_after = xc;
    ev.r_after = rc;
    ev.price_after = detail::price_or_inf(s, xc, rc);
    ev.cost = p.k * std::exp(-p.r * time) * (x - xc);
    return ev;
}

/// One realisation of the strategy from (x0, R0) up to the horizon or exhaustion.
inline Path simulate_path(const ValueSurface& s, double x0, double R0, std::uint64_t seed,
                          const SimulationOptions& opts = {}, std::uint64_t stream_id = 0) {
    const auto& p = s.params();
    if (!(opts.horizon > 0.0)) throw DomainError("simulate_path: horizon must be positive");
    if (x0 < 0.0 || R0 < 0.0) throw DomainError("simulate_path: negative initial state");
    s.locate(x0);  // GridError when x0 is outside the solved range

    Path path;
    path.params = p;
    path.seed = seed;
    path.stream_id = stream_id;
    path.x0 = x0;
    path.r0 = R0;
    path.horizon = opts.horizon;
    RngStream rng(seed, stream_id);

    double t = 0.0;
    double x = x0;
    double R = R0;
    std::optional<double> left_price;
    const bool explore_first = x0 > 0.0 && R0 <= detail::strategy_frontier(s, x0, opts.frontier_scale);
    if (!explore_first) {
        PathEvent start;
        start.kind = EventKind::ConsumptionStart;
        start.x_before = start.x_after = x0;
        start.r_before = start.r_after = R0;
        start.price_before = start.price_after = detail::price_or_inf(s, x0, R0);
        path.events.push_back(start);
    }
    while (true) {
        if (x > 0.0 && R <= detail::strategy_frontier(s, x, opts.frontier_scale)) {
            PathEvent ev = exploration_episode(s, x, R, rng, t, opts.frontier_scale, left_price);
            x = ev.x_after;
            R = ev.r_after;
            const bool exhausted = ev.kind == EventKind::Exhaustion;
            path.events.push_back(std::move(ev));
            if (exhausted) {
                path.exhaustion_time = t;
                path.segments.push_back(consumption_segment(s, 0.0, R, t));
                break;
            }
        }
        const ConsumptionSegment seg = consumption_segment(s, x, R, t, opts.frontier_scale);
        path.segments.push_back(seg);
        if (!(seg.end_time() <= opts.horizon)) break;
        t = seg.end_time();
        R = seg.r_end;
        left_price = seg.price_after(p, seg.duration);
    }
    return path;
}

struct PathSample {
    double time = 0.0;
    double price = 0.0;
    double reserves = 0.0;
    double explored_area = 0.0;
    double consumption_rate = 0.0;
    bool exhausted = false;
};

/// Evaluates the segment closed forms at each time. At an episode time the post-episode state is
/// reported.
inline std::vector<PathSample> sample_path(const Path& path, std::span<const double> times) {
    const auto& p = path.params;
    std::vector<PathSample> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0.0 && t <= path.horizon)) {
            std::ostringstream msg;
            msg << "sample time " << t << " outside [0, " << path.horizon << "]";
            throw TimeOutOfRange(msg.str());
        }
        const auto it = std::upper_bound(path.segments.begin(), path.segments.end(), t,
                                         [](double tt, const ConsumptionSegment& seg) { return tt < seg.start_time; });
        if (it == path.segments.begin()) throw TimeOutOfRange("sample time precedes the first segment");
        const ConsumptionSegment& seg = *(it - 1);
        const double tau = t - seg.start_time;
        PathSample smp;
        smp.time = t;
        smp.price = seg.price_after(p, tau);
        smp.reserves = std::max(seg.reserves_after(p, tau), 0.0);
        smp.explored_area = path.x0 - seg.x;
        smp.consumption_rate = seg.consumption_after(p, tau);
        smp.exhausted = path.exhaustion_time.has_value() && t >= *path.exhaustion_time;
        out.push_back(smp);
    }
    return out;
}

}  // namespace hotelling
