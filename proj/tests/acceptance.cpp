// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hotelling/commands.hpp"
#include "hotelling/config.hpp"
#include "hotelling/dpp.hpp"
#include "hotelling/frontier_bounds.hpp"
#include "hotelling/monte_carlo.hpp"
#include "hotelling/residuals.hpp"
#include "hotelling/solver.hpp"
#include "hotelling/strategy.hpp"

using namespace hotelling;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig load(const std::string& name) {
    return parse_config(read_file(std::filesystem::path(HOTELLING_CONFIG_DIR) / name));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << " ("
              << fmt(seconds_since(t0)) << " s)" << std::endl;
}

struct Solved {
    RunConfig cfg;
    ValueSurface surface;
    double seconds;
};

Solved solve_config(const std::string& name) {
    auto cfg = load(name);
    const auto t0 = Clock::now();
    auto s = config_surface(cfg);
    return {cfg, std::move(s), seconds_since(t0)};
}

EnsembleConfig ensemble_config(const RunConfig& cfg, const ValueSurface& s) {
    const auto [x0, r0] = start_state(cfg, s);
    EnsembleConfig ec;
    ec.x0 = x0;
    ec.r0 = r0;
    ec.n_paths = cfg.simulation.n_paths;
    ec.horizon = cfg.simulation.horizon;
    ec.base_seed = cfg.simulation.base_seed;
    ec.time_intervals = cfg.simulation.time_points;
    ec.threads = 0;
    return ec;
}

}  // namespace

int main() {
    const auto a = solve_config("set_a.cfg");
    const auto b = solve_config("set_b.cfg");
    const std::vector<const Solved*> both{&a, &b};

    report(1, "frontier anchor", [&] {
        Outcome o{true, ""};
        for (const auto* s : both) {
            const auto& f = s->surface.frontier();
            const double anchor = frontier_at_zero(s->cfg.model);
            const double rel = std::abs(f.r_star[1] - anchor) / anchor;
            o.pass = o.pass && rel <= 1e-3 && s->seconds < 1.0;
            o.detail += "rel=" + fmt(rel) + " solve=" + fmt(s->seconds) + "s; ";
        }
        return o;
    });

    report(2, "frontier monotone and within bounds", [&] {
        Outcome o{true, ""};
        for (const auto* s : both) {
            const auto& p = s->cfg.model;
            const auto& f = s->surface.frontier();
            const double upper = upper_frontier_bound(p, s->surface.grid().x_max());
            double worst_rise = -1e300;
            double margin = 1e300;
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (i > 0) worst_rise = std::max(worst_rise, f.r_star[i] - f.r_star[i - 1]);
                margin = std::min(margin, f.r_star[i] - lower_frontier_bound(p, f.x_nodes[i]));
                margin = std::min(margin, upper - f.r_star[i]);
            }
            o.pass = o.pass && worst_rise < 0.0 && margin >= 0.0 && s->seconds < 60.0;
            o.detail += "max rise=" + fmt(worst_rise) + " bound margin=" + fmt(margin) + "; ";
        }
        return o;
    });

    report(3, "value sandwich", [&] {
        Outcome o{true, ""};
        for (const auto* s : both) {
            const auto& p = s->cfg.model;
            const auto& g = s->surface.grid();
            std::size_t violations = 0;
            std::size_t nodes = 0;
            for (std::size_t i = 0; i < g.n_x(); ++i) {
                const auto v = s->surface.v_row(i);
                for (std::size_t j = 0; j < g.n_r; ++j) {
                    const double R = g.r_node(j);
                    const double slack = 1e-12 * std::max(1.0, v[j]);
                    const bool ok = hotelling_value(p, R) <= v[j] + slack &&
                                    v[j] <= full_information_value(p, g.x_nodes[i], R) + slack;
                    violations += ok ? 0 : 1;
                    ++nodes;
                }
            }
            o.pass = o.pass && violations == 0;
            o.detail += std::to_string(violations) + "/" + std::to_string(nodes) + " violations; ";
        }
        return o;
    });

    report(4, "HJB residual suite", [&] {
        Outcome o{true, ""};
        for (const auto* s : both) {
            const auto base = hjb_residuals(s->surface);
            const auto& g = s->surface.grid();
            GridSpec half;
            half.x_step = 0.5 * g.x_step;
            half.r_step = 0.5 * g.r_step;
            const auto fine = hjb_residuals(solve(s->cfg.model, default_grid(s->cfg.model, s->cfg.x_max, half)));
            const double r_cons = base.max_consumption_residual / fine.max_consumption_residual;
            const double r_expl = base.max_exploration_residual / fine.max_exploration_residual;
            const double r_clas = base.max_classic_residual / fine.max_classic_residual;
            const double r_past = base.smooth_pasting_gap / fine.smooth_pasting_gap;
            const bool limits = base.max_consumption_residual <= 1e-2 && base.max_exploration_residual <= 1e-3 &&
                                base.max_classic_residual <= 1e-2 && base.smooth_pasting_gap <= 1e-2;
            const bool shrink = r_cons >= 1.8 && r_expl >= 1.8 && r_clas >= 1.8 && r_past >= 1.8;
            o.pass = o.pass && limits && shrink;
            o.detail += "cons=" + fmt(base.max_consumption_residual) + " expl=" + fmt(base.max_exploration_residual) +
                        " classic=" + fmt(base.max_classic_residual) + " pasting=" + fmt(base.smooth_pasting_gap) +
                        " shrink=" + fmt(r_cons) + "/" + fmt(r_expl) + "/" + fmt(r_clas) + "/" + fmt(r_past) + "; ";
        }
        return o;
    });

    report(5, "DPP oracle equivalence", [&] {
        const auto& p = b.cfg.model;
        const auto t0 = Clock::now();
        const auto g = default_grid(p, 0.3, GridSpec{0.02, 0.05, -1.0});
        const auto s = solve(p, g);
        const auto d = dpp_fixed_point(p, g);
        double gap = 0.0;
        for (std::size_t i = 0; i < d.x_nodes.size(); ++i) {
            const auto v = s.v_row(i);
            for (std::size_t j = 0; j < d.r_nodes.size(); ++j) {
                if (v[j] > 0.0) gap = std::max(gap, std::abs(d.at(i, j) - v[j]) / v[j]);
            }
        }
        const double secs = seconds_since(t0);
        return Outcome{gap <= 1e-2 && secs < 300.0,
                       "max rel gap=" + fmt(gap) + " rounds=" + std::to_string(d.rounds) +
                           " last change=" + fmt(d.last_change) +
                           (d.convergence_warning ? " (convergence warning)" : "")};
    });

    const auto t_ens = Clock::now();
    const auto ens_b = run_ensemble(b.surface, ensemble_config(b.cfg, b.surface));
    const double ens_b_seconds = seconds_since(t_ens);

    report(6, "martingale of the discounted price", [&] {
        const std::vector<double> at{25.0, 50.0, 100.0};
        const auto rep = martingale_test(ens_b, 3.0, at);
        std::string z;
        for (double v : rep.z) z += fmt(v) + " ";
        return Outcome{rep.all_pass && ens_b_seconds < 120.0,
                       "n=" + std::to_string(ens_b.paths.size()) + " z=" + z + "ensemble=" + fmt(ens_b_seconds) + "s"};
    });

    report(7, "conditional growth below r", [&] {
        const auto rep = conditional_growth_check(ens_b);
        return Outcome{rep.slope < rep.r && rep.upper_bound < rep.r,
                       "slope=" + fmt(rep.slope) + " upper95=" + fmt(rep.upper_bound) + " r=" + fmt(rep.r) +
                           " window end=" + fmt(rep.window_end)};
    });

    report(8, "exhaustion jumps upward; episodes jump both ways", [&] {
        const auto ens_a = run_ensemble(a.surface, ensemble_config(a.cfg, a.surface));
        const auto ja = exhaustion_jump_check(ens_a);
        const auto jb = exhaustion_jump_check(ens_b);
        const bool ok = ja.exhaustion_events + jb.exhaustion_events > 0 && ja.all_exhaustion_up() &&
                        jb.all_exhaustion_up() && ja.both_signs_in_episodes();
        return Outcome{ok, "A: " + std::to_string(ja.exhaustion_up) + "/" + std::to_string(ja.exhaustion_events) +
                               " exhaustions up, episodes up/down " + std::to_string(ja.episodes_up) + "/" +
                               std::to_string(ja.episodes_down) + "; B: " + std::to_string(jb.exhaustion_up) + "/" +
                               std::to_string(jb.exhaustion_events) + " exhaustions up"};
    });

    report(9, "set A and set B frontiers cross once", [&] {
        const double x_max = std::min(a.surface.grid().x_max(), b.surface.grid().x_max());
        const auto& xs = a.surface.grid().x_nodes;
        int crossings = 0;
        int prev_sign = 0;
        double where = 0.0;
        for (double x : xs) {
            if (x > x_max) break;
            const double d = a.surface.frontier_at(x) - b.surface.frontier_at(x);
            const int sign = (d > 0.0) - (d < 0.0);
            if (sign != 0 && prev_sign != 0 && sign != prev_sign) {
                ++crossings;
                where = x;
            }
            if (sign != 0) prev_sign = sign;
        }
        return Outcome{crossings == 1, std::to_string(crossings) + " crossing(s), last near x=" + fmt(where)};
    });

    report(10, "Hotelling rule within consumption segments", [&] {
        const auto& s = b.surface;
        const auto& p = b.cfg.model;
        const auto [x0, r0] = start_state(b.cfg, s);
        double worst = 0.0;
        std::size_t segments = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto path = simulate_path(s, x0, r0, seed);
            for (const auto& seg : path.segments) {
                const double span = std::min(seg.duration, path.horizon - seg.start_time);
                if (!(span > 0.0)) continue;
                ++segments;
                // shadow price read off the solved surface along the consumed reserve path
                auto price = [&](double tau) {
                    const double R = seg.reserves_after(p, tau);
                    return seg.x > 0.0 ? s.price_at(seg.x, R) : hotelling_price(p, R);
                };
                const double p1 = price(0.0);
                for (double f : {0.25, 0.5, 0.999}) {
                    const double tau = f * span;
                    const double rel = std::abs(price(tau) / p1 / std::exp(p.r * tau) - 1.0);
                    worst = std::max(worst, rel);
                }
            }
        }
        return Outcome{worst <= 1e-6, std::to_string(segments) + " segments, worst rel=" + fmt(worst)};
    });

    report(11, "ensemble exports reproducible across thread counts", [&] {
        const auto root = std::filesystem::temp_directory_path() / "hotelling_acceptance";
        std::filesystem::remove_all(root);
        std::ostringstream log;
        for (unsigned threads : {1u, 4u}) {
            CommandOptions o;
            o.quiet = true;
            o.threads = threads;
            o.out_dir = (root / ("threads" + std::to_string(threads))).string();
            cmd_ensemble(b.cfg, o, log);
        }
        bool same = true;
        for (const char* f : {"stats.csv", "stats.json"}) {
            const auto x = read_file(root / "threads1" / f);
            const auto y = read_file(root / "threads4" / f);
            same = same && !x.empty() && x == y;
        }
        return Outcome{same, same ? "stats.csv and stats.json identical for 1 and 4 threads" : "exports differ"};
    });

    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
