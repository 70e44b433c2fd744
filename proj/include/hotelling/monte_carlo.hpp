#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <sstream>
#include <thread>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/numerics.hpp"
#include "hotelling/solver.hpp"
#include "hotelling/strategy.hpp"

namespace hotelling {

struct EnsembleConfig {
    double x0 = 1.0;
    double r0 = 1.0;
    std::size_t n_paths = 1000;
    double horizon = 100.0;
    std::uint64_t base_seed = 1;
    std::size_t time_intervals = 200;  ///< the time grid has time_intervals + 1 points including 0
    unsigned threads = 0;              ///< 0 uses the hardware concurrency
    double survival_floor = 0.005;     ///< conditional means are reported only above this survival
    double frontier_scale = 1.0;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<double> mean_price, se_price;
    std::vector<double> mean_price_conditional, se_price_conditional;  ///< NaN where survival < floor
    std::vector<double> mean_price_exhausted;                          ///< NaN where nothing is exhausted
    std::vector<double> q05, q25, q50, q75, q95;                      ///< price quantiles
    std::vector<double> mean_reserves, se_reserves;
    std::vector<double> mean_explored, se_explored;
    std::vector<double> mean_consumption, se_consumption;
};

/// Paths, their samples on the time grid (row-major, path by time), and the aggregate statistics.
struct Ensemble {
    EnsembleConfig config;
    double p0 = 0.0;  ///< shadow price at (x0, R0)
    double r = 0.0;
    std::vector<double> times;
    std::vector<Path> paths;
    std::vector<double> price, reserves, explored, consumption;
    std::vector<unsigned char> exhausted;
    EnsembleStats stats;

    std::size_t n_times() const { return times.size(); }
    std::size_t index(std::size_t path, std::size_t time) const { return path * times.size() + time; }
};

namespace detail {

struct MeanSe {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
};

/// Mean and standard error of the selected values, summed in index order.
template <class Get, class Keep>
MeanSe mean_se(std::size_t n, Get&& get, Keep&& keep) {
    numerics::CompensatedSum sum;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep(i)) continue;
        sum.add(get(i));
        ++count;
    }
    MeanSe out;
    out.n = count;
    if (count == 0) return out;
    out.mean = sum.value() / static_cast<double>(count);
    if (count < 2) {
        out.se = 0.0;
        return out;
    }
    numerics::CompensatedSum sq;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep(i)) continue;
        const double d = get(i) - out.mean;
        sq.add(d * d);
    }
    out.se = std::sqrt(sq.value() / static_cast<double>(count - 1) / static_cast<double>(count));
    return out;
}

inline double one_sided_normal_quantile(double confidence) {
    if (!(confidence > 0.5 && confidence < 1.0)) throw DomainError("confidence must lie in (0.5, 1)");
    auto tail = [&](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)) - (1.0 - confidence); };
    return numerics::bisect(tail, 0.0, 40.0, 1e-14);
}

}  // namespace detail

inline EnsembleStats aggregate(const Ensemble& e) {
    const std::size_t n = e.paths.size();
    const std::size_t nt = e.n_times();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EnsembleStats st;
    st.times = e.times;
    auto resize = [&](std::vector<double>& v) { v.assign(nt, nan); };
    for (auto* v : {&st.survival, &st.mean_price, &st.se_price, &st.mean_price_conditional, &st.se_price_conditional,
                    &st.mean_price_exhausted, &st.q05, &st.q25, &st.q50, &st.q75, &st.q95, &st.mean_reserves,
                    &st.se_reserves, &st.mean_explored, &st.se_explored, &st.mean_consumption, &st.se_consumption}) {
        resize(*v);
    }
    std::vector<double> column(n);
    for (std::size_t m = 0; m < nt; ++m) {
        auto at = [&](const std::vector<double>& v) { return [&v, &e, m](std::size_t i) { return v[e.index(i, m)]; }; };
        auto all = [](std::size_t) { return true; };
        auto alive = [&](std::size_t i) { return e.exhausted[e.index(i, m)] == 0; };
        auto dead = [&](std::size_t i) { return e.exhausted[e.index(i, m)] != 0; };

        const auto price = detail::mean_se(n, at(e.price), all);
        st.mean_price[m] = price.mean;
        st.se_price[m] = price.se;
        const auto cond = detail::mean_se(n, at(e.price), alive);
        st.survival[m] = static_cast<double>(cond.n) / static_cast<double>(n);
        if (cond.n > 0 && st.survival[m] >= e.config.survival_floor) {
            st.mean_price_conditional[m] = cond.mean;
            st.se_price_conditional[m] = cond.se;
        }
        const auto gone = detail::mean_se(n, at(e.price), dead);
        if (gone.n > 0) st.mean_price_exhausted[m] = gone.mean;

        const auto res = detail::mean_se(n, at(e.reserves), all);
        st.mean_reserves[m] = res.mean;
        st.se_reserves[m] = res.se;
        const auto exp = detail::mean_se(n, at(e.explored), all);
        st.mean_explored[m] = exp.mean;
        st.se_explored[m] = exp.se;
        const auto con = detail::mean_se(n, at(e.consumption), all);
        st.mean_consumption[m] = con.mean;
        st.se_consumption[m] = con.se;

        for (std::size_t i = 0; i < n; ++i) column[i] = e.price[e.index(i, m)];
        std::sort(column.begin(), column.end());
        st.q05[m] = numerics::sorted_quantile(column, 0.05);
        st.q25[m] = numerics::sorted_quantile(column, 0.25);
        st.q50[m] = numerics::sorted_quantile(column, 0.50);
        st.q75[m] = numerics::sorted_quantile(column, 0.75);
        st.q95[m] = numerics::sorted_quantile(column, 0.95);
    }
    return st;
}

/// Simulates n_paths paths with seeds base_seed + i and aggregates them on an equally spaced time grid.
/// Results do not depend on the thread count.
inline Ensemble run_ensemble(const ValueSurface& s, const EnsembleConfig& cfg) {
    if (cfg.n_paths < 1) throw DomainError("run_ensemble: n_paths must be at least 1");
    if (!(cfg.horizon > 0.0)) throw DomainError("run_ensemble: horizon must be positive");
    if (cfg.time_intervals < 1) throw DomainError("run_ensemble: need at least one time interval");

    Ensemble e;
    e.config = cfg;
    e.r = s.params().r;
    e.p0 = detail::price_or_inf(s, cfg.x0, cfg.r0);
    e.times.resize(cfg.time_intervals + 1);
    for (std::size_t m = 0; m <= cfg.time_intervals; ++m) {
        e.times[m] = cfg.horizon * static_cast<double>(m) / static_cast<double>(cfg.time_intervals);
    }
    e.times.back() = cfg.horizon;
    const std::size_t n = cfg.n_paths;
    const std::size_t nt = e.times.size();
    e.paths.resize(n);
    e.price.resize(n * nt);
    e.reserves.resize(n * nt);
    e.explored.resize(n * nt);
    e.consumption.resize(n * nt);
    e.exhausted.resize(n * nt);

    SimulationOptions opts;
    opts.horizon = cfg.horizon;
    opts.frontier_scale = cfg.frontier_scale;
    auto work = [&](std::size_t i) {
        e.paths[i] = simulate_path(s, cfg.x0, cfg.r0, cfg.base_seed + i, opts);
        const auto samples = sample_path(e.paths[i], e.times);
        for (std::size_t m = 0; m < nt; ++m) {
            const auto k = e.index(i, m);
            e.price[k] = samples[m].price;
            e.reserves[k] = samples[m].reserves;
            e.explored[k] = samples[m].explored_area;
            e.consumption[k] = samples[m].consumption_rate;
            e.exhausted[k] = samples[m].exhausted ? 1 : 0;
        }
    };

    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += threads) work(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    e.stats = aggregate(e);
    return e;
}

struct MartingaleReport {
    std::vector<double> times;
    std::vector<double> mean_price;
    std::vector<double> theoretical;  ///< p0 e^{r t}
    std::vector<double> stderr_;
    std::vector<double> z;
    std::vector<bool> pass;
    double threshold = 3.0;
    bool all_pass = true;
};

/// z-test of E[p_t] = p0 e^{rt} at the requested grid times (all grid times when `at` is empty).
inline MartingaleReport martingale_test(const Ensemble& e, double threshold = 3.0, std::span<const double> at = {}) {
    std::vector<std::size_t> idx;
    if (at.empty()) {
        for (std::size_t m = 0; m < e.n_times(); ++m) idx.push_back(m);
    } else {
        for (double t : at) {
            const auto it = std::min_element(e.times.begin(), e.times.end(),
                                             [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
            if (std::abs(*it - t) > 1e-9 * std::max(1.0, e.config.horizon)) {
                std::ostringstream msg;
                msg << "time " << t << " is not on the ensemble time grid";
                throw TimeOutOfRange(msg.str());
            }
            idx.push_back(static_cast<std::size_t>(it - e.times.begin()));
        }
    }
    MartingaleReport rep;
    rep.threshold = threshold;
    const std::size_t n = e.paths.size();
    for (std::size_t m : idx) {
        const double t = e.times[m];
        const double target = e.p0 * std::exp(e.r * t);
        const auto d = detail::mean_se(
            n, [&](std::size_t i) { return e.price[e.index(i, m)] - target; }, [](std::size_t) { return true; });
        const double z = d.mean == 0.0 ? 0.0 : d.mean / d.se;
        rep.times.push_back(t);
        rep.mean_price.push_back(target + d.mean);
        rep.theoretical.push_back(target);
        rep.stderr_.push_back(d.se);
        rep.z.push_back(z);
        const bool ok = std::isfinite(z) && std::abs(z) <= threshold;
        rep.pass.push_back(ok);
        rep.all_pass = rep.all_pass && ok;
    }
    return rep;
}

struct JumpReport {
    std::size_t exhaustion_events = 0;
    std::size_t exhaustion_up = 0;
    std::size_t episodes = 0;  ///< non-terminal exploration episodes
    std::size_t episodes_up = 0;
    std::size_t episodes_down = 0;
    std::vector<double> exhaustion_jumps;  ///< price_after - price_before, sorted
    bool all_exhaustion_up() const { return exhaustion_up == exhaustion_events; }
    bool both_signs_in_episodes() const { return episodes_up > 0 && episodes_down > 0; }
};

inline JumpReport exhaustion_jump_check(const Ensemble& e) {
    JumpReport rep;
    for (const auto& path : e.paths) {
        for (const auto& ev : path.events) {
            if (ev.kind == EventKind::Exhaustion) {
                ++rep.exhaustion_events;
                if (ev.price_after > ev.price_before) ++rep.exhaustion_up;
                rep.exhaustion_jumps.push_back(ev.price_after - ev.price_before);
            } else if (ev.kind == EventKind::ExplorationEpisode) {
                ++rep.episodes;
                if (ev.price_after > ev.price_before) ++rep.episodes_up;
                if (ev.price_after < ev.price_before) ++rep.episodes_down;
            }
        }
    }
    std::sort(rep.exhaustion_jumps.begin(), rep.exhaustion_jumps.end());
    return rep;
}

struct GrowthReport {
    double slope = 0.0;  ///< least-squares slope of log conditional mean price against time
    double stderr_ = 0.0;  ///< delete-a-group jackknife over paths
    double upper_bound = 0.0;
    double confidence = 0.95;
    double r = 0.0;
    double window_end = 0.0;
    std::size_t points = 0;
    bool pass = false;  ///< upper_bound < r
};

/// Fits the growth rate of the conditional mean price over the leading window where survival >= floor.
inline GrowthReport conditional_growth_check(const Ensemble& e, double survival_floor = 0.2, double confidence = 0.95,
                                             std::size_t jackknife_groups = 20) {
    const auto& st = e.stats;
    std::size_t window = 0;
    while (window < e.n_times() && st.survival[window] >= survival_floor &&
           std::isfinite(st.mean_price_conditional[window])) {
        ++window;
    }
    if (window < 2) throw InsufficientData("conditional_growth_check: fewer than two times with enough survivors");
    const std::size_t n = e.paths.size();

    auto fit = [&](auto&& keep) {
        std::vector<double> ys(window);
        for (std::size_t m = 0; m < window; ++m) {
            const auto c = detail::mean_se(
                n, [&](std::size_t i) { return e.price[e.index(i, m)]; },
                [&](std::size_t i) { return keep(i) && e.exhausted[e.index(i, m)] == 0; });
            if (c.n == 0) throw InsufficientData("conditional_growth_check: empty jackknife group");
            ys[m] = std::log(c.mean);
        }
        double tbar = 0.0;
        double ybar = 0.0;
        for (std::size_t m = 0; m < window; ++m) {
            tbar += e.times[m];
            ybar += ys[m];
        }
        tbar /= static_cast<double>(window);
        ybar /= static_cast<double>(window);
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t m = 0; m < window; ++m) {
            sxy += (e.times[m] - tbar) * (ys[m] - ybar);
            sxx += (e.times[m] - tbar) * (e.times[m] - tbar);
        }
        return sxy / sxx;
    };

    GrowthReport rep;
    rep.r = e.r;
    rep.confidence = confidence;
    rep.points = window;
    rep.window_end = e.times[window - 1];
    rep.slope = fit([](std::size_t) { return true; });

    const std::size_t groups = std::min(jackknife_groups, n);
    if (groups >= 2) {
        std::vector<double> partial(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            partial[g] = fit([&](std::size_t i) { return i * groups / n != g; });
        }
        double mean = 0.0;
        for (double v : partial) mean += v;
        mean /= static_cast<double>(groups);
        double ss = 0.0;
        for (double v : partial) ss += (v - mean) * (v - mean);
        rep.stderr_ = std::sqrt(ss * static_cast<double>(groups - 1) / static_cast<double>(groups));
    }
    rep.upper_bound = rep.slope + detail::one_sided_normal_quantile(confidence) * rep.stderr_;
    rep.pass = rep.upper_bound < rep.r;
    return rep;
}

}  // namespace hotelling
