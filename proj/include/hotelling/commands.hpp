#pragma once

// Subcommand implementations behind tools/hotelling_cli. Each writes its tables and sidecars into the
// output directory and returns a process exit code.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotelling/config.hpp"
#include "hotelling/frontier_bounds.hpp"
#include "hotelling/grid.hpp"
#include "hotelling/io.hpp"
#include "hotelling/model.hpp"
#include "hotelling/monte_carlo.hpp"
#include "hotelling/residuals.hpp"
#include "hotelling/solver.hpp"
#include "hotelling/strategy.hpp"

namespace hotelling {

struct CommandOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quiet = false;
};

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_usage = 2, exit_check_failed = 3 };

inline std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& o) {
    return o.out_dir ? *o.out_dir : cfg.output_directory;
}

inline SolverGrid config_grid(const RunConfig& cfg) {
    GridSpec spec;
    if (cfg.x_step) spec.x_step = *cfg.x_step;
    if (cfg.r_step) spec.r_step = *cfg.r_step;
    return default_grid(cfg.model, cfg.x_max, spec);
}

inline ValueSurface config_surface(const RunConfig& cfg) { return solve(cfg.model, config_grid(cfg)); }

/// Start of simulations: x0 defaults to x_max, R0 to the midpoint of R*(x0) and R*(0).
inline std::pair<double, double> start_state(const RunConfig& cfg, const ValueSurface& s) {
    const double x0 = cfg.simulation.x0.value_or(cfg.x_max);
    const double r0 = cfg.simulation.r0.value_or(0.5 * (s.frontier_at(x0) + s.frontier().r0));
    return {x0, r0};
}

inline int cmd_solve(const RunConfig& cfg, const CommandOptions& o, std::ostream& log) {
    const auto s = config_surface(cfg);
    const auto dir = output_dir(cfg, o);
    {
        auto out = open_output(dir, "surface.csv");
        write_surface_csv(out, s);
    }
    {
        auto out = open_output(dir, "frontier.csv");
        write_frontier_csv(out, s);
    }
    write_json(dir / "surface.json",
               sidecar("surface", {"x", "R", "V", "MV", "region", "price"}, cfg.model, s.grid()));
    write_json(dir / "frontier.json", sidecar("frontier", {"x", "r_star", "p_star"}, cfg.model, s.grid()));
    if (!o.quiet) {
        log << "solved " << s.grid().n_x() << " x " << s.grid().n_r << " nodes; R*(0) = "
            << format_double(s.frontier().r0) << "; wrote " << (dir / "surface.csv").string() << "\n";
    }
    return exit_ok;
}

inline int cmd_frontier(const RunConfig& cfg, const CommandOptions& o, std::ostream& log) {
    const auto s = config_surface(cfg);
    const auto dir = output_dir(cfg, o);
    {
        auto out = open_output(dir, "frontier.csv");
        write_frontier_csv(out, s);
    }
    auto meta = sidecar("frontier", {"x", "r_star", "p_star"}, cfg.model, s.grid());
    meta["r0"] = s.frontier().r0;
    write_json(dir / "frontier.json", meta);
    if (!o.quiet) {
        log << "R*(0) = " << format_double(s.frontier().r0) << "\n";
        log << "R*(x_max) = " << format_double(s.frontier().r_star.back()) << "\n";
    }
    return exit_ok;
}

inline int cmd_simulate(const RunConfig& cfg, const CommandOptions& o, std::ostream& log) {
    const auto s = config_surface(cfg);
    const auto [x0, r0] = start_state(cfg, s);
    const std::uint64_t seed = o.seed.value_or(cfg.simulation.base_seed);
    SimulationOptions opts;
    opts.horizon = cfg.simulation.horizon;
    const Path path = simulate_path(s, x0, r0, seed, opts);

    std::vector<double> times(cfg.simulation.time_points + 1);
    for (std::size_t m = 0; m < times.size(); ++m) {
        times[m] = opts.horizon * static_cast<double>(m) / static_cast<double>(cfg.simulation.time_points);
    }
    times.back() = opts.horizon;
    const auto samples = sample_path(path, times);

    const auto dir = output_dir(cfg, o);
    {
        auto out = open_output(dir, "events.csv");
        write_events_csv(out, path);
    }
    {
        auto out = open_output(dir, "series.csv");
        write_series_csv(out, samples);
    }
    auto path_meta = [&](const std::string& name, std::initializer_list<std::string_view> cols) {
        auto meta = sidecar(name, cols, cfg.model, s.grid());
        meta["seed"] = seed;
        meta["x0"] = x0;
        meta["R0"] = r0;
        meta["horizon"] = opts.horizon;
        if (path.exhaustion_time) {
            meta["exhaustion_time"] = *path.exhaustion_time;
        } else {
            meta["exhaustion_time"] = nullptr;
        }
        write_json(dir / (name + ".json"), meta);
    };
    path_meta("events", {"index", "kind", "time", "x_before", "x_after", "r_before", "r_after", "finds",
                         "price_before", "price_after", "discounted_cost"});
    path_meta("series", {"time", "price", "reserves", "explored_area", "consumption_rate", "exhausted"});
    if (!o.quiet) {
        log << "path: " << path.events.size() << " events, " << path.total_finds() << " finds, ";
        if (path.exhaustion_time) {
            log << "exhausted at t = " << format_double(*path.exhaustion_time) << "\n";
        } else {
            log << "not exhausted within the horizon\n";
        }
    }
    return exit_ok;
}

inline int cmd_ensemble(const RunConfig& cfg, const CommandOptions& o, std::ostream& log) {
    if (cfg.simulation.n_paths == 0) throw UsageError("ensemble: n_paths must be at least 1");
    const auto s = config_surface(cfg);
    const auto [x0, r0] = start_state(cfg, s);
    EnsembleConfig ec;
    ec.x0 = x0;
    ec.r0 = r0;
    ec.n_paths = cfg.simulation.n_paths;
    ec.horizon = cfg.simulation.horizon;
    ec.base_seed = o.seed.value_or(cfg.simulation.base_seed);
    ec.time_intervals = cfg.simulation.time_points;
    ec.threads = o.threads.value_or(cfg.simulation.threads);
    const Ensemble e = run_ensemble(s, ec);

    const auto dir = output_dir(cfg, o);
    {
        auto out = open_output(dir, "stats.csv");
        write_stats_csv(out, e);
    }
    auto meta = sidecar("stats", {"time", "statistic", "value", "stderr"}, cfg.model, s.grid());
    meta["base_seed"] = ec.base_seed;
    meta["n_paths"] = ec.n_paths;
    meta["x0"] = x0;
    meta["R0"] = r0;
    meta["p0"] = e.p0;
    meta["horizon"] = ec.horizon;

    const auto mart = martingale_test(e);
    nlohmann::ordered_json checks;
    checks["martingale_all_times_pass"] = mart.all_pass;
    const auto jumps = exhaustion_jump_check(e);
    checks["exhaustion_events"] = jumps.exhaustion_events;
    checks["exhaustion_up"] = jumps.exhaustion_up;
    checks["episodes_up"] = jumps.episodes_up;
    checks["episodes_down"] = jumps.episodes_down;
    try {
        const auto growth = conditional_growth_check(e);
        checks["conditional_slope"] = growth.slope;
        checks["conditional_slope_stderr"] = growth.stderr_;
        checks["conditional_slope_upper"] = growth.upper_bound;
        checks["conditional_window_end"] = growth.window_end;
    } catch (const InsufficientData& err) {
        checks["conditional_slope"] = nullptr;
        checks["conditional_note"] = err.what();
    }
    meta["checks"] = checks;
    write_json(dir / "stats.json", meta);
    if (!o.quiet) {
        log << "ensemble of " << ec.n_paths << " paths; " << jumps.exhaustion_events << " exhausted; wrote "
            << (dir / "stats.csv").string() << "\n";
    }
    return exit_ok;
}

/// Residuals, bounds, frontier shape and anchor, printed as one PASS/FAIL line per check.
inline int cmd_validate(const RunConfig& cfg, const CommandOptions& o, std::ostream& log) {
    const auto& p = cfg.model;
    const auto s = config_surface(cfg);
    const auto& g = s.grid();
    const auto& f = s.frontier();
    nlohmann::ordered_json report;
    bool all = true;
    auto check = [&](const std::string& name, bool ok, double value, double limit) {
        all = all && ok;
        report[name] = {{"pass", ok}, {"value", value}, {"limit", limit}};
        if (!o.quiet) {
            log << (ok ? "PASS " : "FAIL ") << name << " value=" << format_double(value)
                << " limit=" << format_double(limit) << "\n";
        }
    };

    const auto res = hjb_residuals(s);
    check("consumption_residual", res.max_consumption_residual <= 1e-2, res.max_consumption_residual, 1e-2);
    check("exploration_residual", res.max_exploration_residual <= 1e-3, res.max_exploration_residual, 1e-3);
    check("classic_residual", res.max_classic_residual <= 1e-2, res.max_classic_residual, 1e-2);
    check("smooth_pasting_gap", res.smooth_pasting_gap <= 1e-2, res.smooth_pasting_gap, 1e-2);

    double lower_violation = 0.0;
    double upper_violation = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const auto v = s.v_row(i);
        for (std::size_t j = 0; j < g.n_r; ++j) {
            const double R = g.r_node(j);
            const double lo = hotelling_value(p, R);
            const double hi = full_information_value(p, g.x_nodes[i], R);
            const double scale = std::max(v[j], 1e-300);
            lower_violation = std::max(lower_violation, (lo - v[j]) / scale);
            upper_violation = std::max(upper_violation, (v[j] - hi) / scale);
        }
    }
    check("sandwich_lower", lower_violation <= 1e-12, lower_violation, 1e-12);
    check("sandwich_upper", upper_violation <= 1e-12, upper_violation, 1e-12);

    double worst_rise = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < f.size(); ++i) worst_rise = std::max(worst_rise, f.r_star[i] - f.r_star[i - 1]);
    check("frontier_strictly_decreasing", f.size() < 2 || worst_rise < 0.0, f.size() < 2 ? 0.0 : worst_rise, 0.0);

    double bound_gap = std::numeric_limits<double>::infinity();
    const double upper = p.k > 0.0 && g.x_max() > 0.0 ? upper_frontier_bound(p, g.x_max()) : 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        bound_gap = std::min(bound_gap, f.r_star[i] - lower_frontier_bound(p, f.x_nodes[i]));
        bound_gap = std::min(bound_gap, upper - f.r_star[i]);
    }
    if (f.size() < 2) bound_gap = 0.0;
    check("frontier_within_bounds", bound_gap >= 0.0, bound_gap, 0.0);

    if (f.size() >= 2) {
        const double anchor = std::abs(f.r_star[1] - f.r0) / f.r0;
        check("frontier_anchor", anchor <= 1e-3, anchor, 1e-3);
    }

    const auto dir = output_dir(cfg, o);
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json meta;
    meta["table"] = "validate";
    meta["artifact_version"] = artifact_version;
    meta["params"] = params_json(p);
    meta["grid"] = grid_json(g);
    meta["checks"] = report;
    meta["all_pass"] = all;
    write_json(dir / "validate.json", meta);
    return all ? exit_ok : exit_check_failed;
}

}  // namespace hotelling
