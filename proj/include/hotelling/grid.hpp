#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/frontier_bounds.hpp"
#include "hotelling/model.hpp"

namespace hotelling {

/// Discretisation of the (unexplored area, reserves) domain.
///
/// x nodes are strictly increasing from 0 and may be non-uniform. Reserve nodes are uniform,
/// R_j = j * r_step for j < n_r, and r_step divides the deposit size a exactly so that R + a is
/// again a node. Value rows are stored on an extended reserve range of n_r + shift nodes, where
/// shift = a / r_step, so the exploration operator can read V(., R + a) for every R <= r_max.
struct SolverGrid {
    std::vector<double> x_nodes;
    double x_step = 0.0;  ///< nominal x spacing
    double r_step = 0.0;
    std::size_t n_r = 0;
    std::size_t shift = 0;

    double x_max() const { return x_nodes.back(); }
    double r_max() const { return r_step * static_cast<double>(n_r - 1); }
    std::size_t n_x() const { return x_nodes.size(); }
    std::size_t n_ext() const { return n_r + shift; }
    double r_node(std::size_t j) const { return r_step * static_cast<double>(j); }

    std::vector<double> r_nodes() const {
        std::vector<double> out(n_r);
        for (std::size_t j = 0; j < n_r; ++j) out[j] = r_node(j);
        return out;
    }
};

inline void check_grid(const ModelParams& p, const SolverGrid& g) {
    if (g.x_nodes.empty() || g.x_nodes.front() != 0.0) throw GridError("x nodes must start at 0");
    for (std::size_t i = 1; i < g.x_nodes.size(); ++i) {
        if (!(g.x_nodes[i] > g.x_nodes[i - 1])) throw GridError("x nodes must be strictly increasing");
    }
    if (!(g.r_step > 0.0)) throw GridError("reserve step must be positive");
    if (g.n_r < 4) throw GridError("reserve grid needs at least four nodes");
    if (g.shift == 0 || std::abs(static_cast<double>(g.shift) * g.r_step - p.a) > 1e-9 * p.a) {
        throw GridError("reserve step must divide the deposit size");
    }
}

/// Builds a grid with uniform x spacing x_step beyond X = G * x_step, G = round(graded_length / x_step).
/// Below X the nodes are x = X (m / 2G)^2, m = 1 .. 2G, so cell widths grow like sqrt(x) and meet
/// x_step at X; this resolves the fast variation of V near x = 0. Keeping graded_length fixed while
/// refining x_step refines the graded zone at the same rate. r_step is shrunk to the nearest divisor of a.
inline SolverGrid make_grid(const ModelParams& p, double x_max, double x_step, double r_step, double r_max,
                            double graded_length = 0.0) {
    if (!(x_max >= 0.0)) throw GridError("x_max must be non-negative");
    if (!(x_step > 0.0) || !(r_step > 0.0) || !(r_max > 0.0)) throw GridError("grid steps must be positive");
    if (!(graded_length >= 0.0)) throw GridError("graded_length must be non-negative");
    const auto graded_cells = static_cast<long>(std::lround(graded_length / x_step));
    SolverGrid g;
    g.x_step = x_step;
    g.x_nodes.push_back(0.0);
    const double tol = 1e-9 * x_step;
    auto push = [&](double x) {
        if (x < x_max - tol) g.x_nodes.push_back(x);
    };
    const double graded_end = x_step * graded_cells;
    const long graded_nodes = 2 * graded_cells;
    for (long m = 1; m <= graded_nodes; ++m) {
        const double xi = static_cast<double>(m) / static_cast<double>(graded_nodes);
        push(graded_end * xi * xi);
    }
    const auto n_full = static_cast<long>(std::floor(x_max / x_step + 1e-9));
    for (long i = graded_cells + 1; i <= n_full; ++i) push(x_step * static_cast<double>(i));
    if (x_max > 0.0) g.x_nodes.push_back(x_max);

    const auto per_deposit = static_cast<std::size_t>(std::ceil(p.a / r_step - 1e-9));
    g.shift = per_deposit;
    g.r_step = p.a / static_cast<double>(per_deposit);
    g.n_r = static_cast<std::size_t>(std::ceil(r_max / g.r_step - 1e-9)) + 1;
    check_grid(p, g);
    return g;
}

struct GridSpec {
    double x_step = 0.0;  ///< 0 selects min(0.01, 0.2/lambda)
    double r_step = 0.0;  ///< 0 selects min(0.01, a/50)
    double graded_length = -1.0;  ///< negative selects 8 default x steps; 0 gives a uniform grid
};

/// Default grid. Because R*(x) decreases in x, R*(0) bounds the frontier; reserves are covered up to
/// R*(0) + a + 10 steps.
inline SolverGrid default_grid(const ModelParams& p, double x_max, const GridSpec& spec = {}) {
    const double x_step = spec.x_step > 0.0 ? spec.x_step : std::min(0.01, 0.2 / p.lambda);
    const double r_step = spec.r_step > 0.0 ? spec.r_step : std::min(0.01, p.a / 50.0);
    const double graded = spec.graded_length >= 0.0 ? spec.graded_length : 8.0 * std::min(0.01, 0.2 / p.lambda);
    const double r_top = frontier_at_zero(p) + p.a + 10.0 * r_step;
    return make_grid(p, x_max, x_step, r_step, r_top, graded);
}

}  // namespace hotelling
