#pragma once

// Value iteration on the dynamic programming principle, used as an independent check of solve().
//
// Round n allows at most n exploration episodes:
//   V^n(x, R) = sup_{0<=Q<=R, theta>=0} U~(theta, Q) + e^{-r theta} M V^{n-1}(x, R - Q),
//   U~(theta, Q) = U(Q) (1 - e^{-r theta/(1-alpha)})^{1-alpha},
// starting from V^0 = U.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/exploration_operator.hpp"
#include "hotelling/grid.hpp"
#include "hotelling/model.hpp"
#include "hotelling/numerics.hpp"

namespace hotelling {

/// U~(theta, Q): utility of consuming Q optimally over [0, theta]. theta = inf gives U(Q).
inline double finite_horizon_utility(const ModelParams& p, double theta, double Q) {
    if (theta < 0.0 || Q < 0.0) throw DomainError("finite_horizon_utility: negative argument");
    const double s = -std::expm1(-p.r * theta / (1.0 - p.alpha));
    return hotelling_value(p, Q) * std::pow(s, 1.0 - p.alpha);
}

/// max over s in [0,1] of A s^{1-alpha} + B (1-s)^{1-alpha}, with s = 1 - e^{-r theta/(1-alpha)} so that
/// e^{-r theta} = (1-s)^{1-alpha}. Golden-section search; the closed form (A^{1/alpha} + B^{1/alpha})^alpha
/// is checked against it in the tests.
inline double best_consumption_time(const ModelParams& p, double A, double B, double tol = 1e-12) {
    const double e = 1.0 - p.alpha;
    if (B == 0.0) return A;
    auto f = [&](double s) { return A * std::pow(s, e) + B * std::pow(1.0 - s, e); };
    return numerics::golden_max(f, 0.0, 1.0, tol).second;
}

struct DppOptions {
    int n_rounds = 6;
    int q_scan = 64;             ///< Q grid points scanned before golden refinement
    double q_tol_fraction = 1e-9;  ///< golden tolerance on Q as a fraction of R
    double warning_threshold = 1e-3;
};

struct DppResult {
    std::vector<double> x_nodes;
    std::vector<double> r_nodes;
    std::vector<double> values;  ///< row-major over (x, R)
    int rounds = 0;
    double last_change = 0.0;  ///< max over nodes of |V^n - V^{n-1}| / V^n in the final round
    bool convergence_warning = false;

    double at(std::size_t i, std::size_t j) const { return values[i * r_nodes.size() + j]; }
};

/// Runs opts.n_rounds of value iteration on the x nodes of `grid` and its reserve nodes up to r_max.
/// Reserves up to r_max + (n_rounds - n) a are kept in round n, since M reads V^{n-1} at R + a.
inline DppResult dpp_fixed_point(const ModelParams& p, const SolverGrid& grid, const DppOptions& opts = {}) {
    if (!(p.k > 0.0)) throw DomainError("dpp_fixed_point requires k > 0");
    if (opts.n_rounds < 1) throw DomainError("dpp_fixed_point requires at least one round");
    check_grid(p, grid);
    const auto& xs = grid.x_nodes;
    const std::size_t nx = xs.size();
    const double h = grid.r_step;
    const auto rounds = static_cast<std::size_t>(opts.n_rounds);
    auto width = [&](std::size_t n) { return grid.n_r + (rounds - n) * grid.shift; };

    // V^0 = U on the widest range
    std::vector<double> prev(nx * width(0));
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < width(0); ++j) prev[i * width(0) + j] = hotelling_value(p, h * double(j));
    }

    DppResult out;
    out.x_nodes = xs;
    out.r_nodes = grid.r_nodes();
    for (std::size_t n = 1; n <= rounds; ++n) {
        const std::size_t wp = width(n - 1);
        const std::size_t wn = width(n);
        auto prev_value = [&](double y, double R) {
            const auto it = std::lower_bound(xs.begin(), xs.end(), y);
            const auto i = static_cast<std::size_t>(it - xs.begin());
            return numerics::cubic_uniform(std::span<const double>(prev.data() + i * wp, wp), h, R);
        };
        std::vector<double> next(nx * wn);
        double change = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = xs[i];
            auto mv = [&](double R) { return apply_exploration_operator(p, xs, prev_value, x, R); };
            for (std::size_t j = 0; j < wn; ++j) {
                const double R = h * double(j);
                // consume Q over an optimal time, then explore with R - Q; Q = R, theta = inf gives U(R)
                auto objective = [&](double Q) {
                    const double B = i == 0 ? 0.0 : mv(R - Q);
                    return best_consumption_time(p, hotelling_value(p, Q), B);
                };
                double best = objective(R);
                if (i > 0 && R > 0.0) {
                    double q_best = R;
                    for (int m = 0; m < opts.q_scan; ++m) {
                        const double Q = R * m / (opts.q_scan - 1);
                        const double val = objective(Q);
                        if (val > best) {
                            best = val;
                            q_best = Q;
                        }
                    }
                    const double step = R / (opts.q_scan - 1);
                    const double lo = std::max(0.0, q_best - step);
                    const double hi = std::min(R, q_best + step);
                    best = std::max(best, numerics::golden_max(objective, lo, hi, opts.q_tol_fraction * R).second);
                }
                next[i * wn + j] = best;
                if (j < grid.n_r && best > 0.0) {
                    change = std::max(change, std::abs(best - prev[i * wp + j]) / best);
                }
            }
        }
        prev.swap(next);
        out.last_change = change;
        out.rounds = static_cast<int>(n);
    }
    out.values.assign(nx * grid.n_r, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        std::copy_n(prev.begin() + static_cast<std::ptrdiff_t>(i * grid.n_r), grid.n_r,
                    out.values.begin() + static_cast<std::ptrdiff_t>(i * grid.n_r));
    }
    out.convergence_warning = out.last_change > opts.warning_threshold;
    return out;
}

}  // namespace hotelling
