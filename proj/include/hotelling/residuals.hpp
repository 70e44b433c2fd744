#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hotelling/exploration_operator.hpp"
#include "hotelling/model.hpp"
#include "hotelling/numerics.hpp"
#include "hotelling/solver.hpp"

namespace hotelling {

/// Relative residuals of the solved surface. Each field converges at second order in the grid steps.
struct ResidualReport {
    /// max |u*(V_R) - r V| / (r V) over nodes whose central stencil lies above the frontier
    double max_consumption_residual = 0.0;
    /// max |V - MV| / V at x midpoints below both neighbouring frontier values; MV recomputed there
    /// by the exploration operator from the interpolated surface
    double max_exploration_residual = 0.0;
    /// max of |lambda (V(x,R+a) - V(x,R)) - V_x - k| in the exploration region and of its positive part
    /// in the consumption region, each divided by k + |V_x| + lambda |V(x,R+a) - V(x,R)|
    double max_classic_residual = 0.0;
    /// max |V_R^- - V_R^+| / V_R^+ at the frontier, using one-sided three-node differences
    double smooth_pasting_gap = 0.0;

    std::size_t consumption_nodes = 0;
    std::size_t exploration_nodes = 0;
    std::size_t classic_nodes = 0;
    std::size_t pasting_rows = 0;
};

namespace detail {

inline double max_finite(double a, double b) { return std::isfinite(b) ? std::max(a, b) : a; }

}  // namespace detail

inline ResidualReport hjb_residuals(const ValueSurface& s) {
    const auto& p = s.params();
    const auto& g = s.grid();
    const auto& f = s.frontier();
    const double h = g.r_step;
    const std::size_t nx = g.n_x();
    ResidualReport rep;

    // consumption region: u*(V_R) = r V
    for (std::size_t i = 0; i < nx; ++i) {
        const auto v = s.v_row(i);
        for (std::size_t j = 1; j + 1 < v.size(); ++j) {
            if (!(g.r_node(j - 1) > f.r_star[i])) continue;
            const double v_r = (v[j + 1] - v[j - 1]) / (2.0 * h);
            const double rv = p.r * v[j];
            rep.max_consumption_residual =
                detail::max_finite(rep.max_consumption_residual, std::abs(conjugate(p, v_r) - rv) / rv);
            ++rep.consumption_nodes;
        }
    }

    // exploration region: V = MV between nodes
    auto value = [&](double y, double R) { return s.value_at(y, R); };
    for (std::size_t i = 1; i < nx; ++i) {
        const double xm = 0.5 * (g.x_nodes[i - 1] + g.x_nodes[i]);
        const double r_lim = std::min(f.r_star[i - 1], f.r_star[i]);
        for (std::size_t j = 1; j < g.n_r && g.r_node(j) <= r_lim; ++j) {
            const double R = g.r_node(j);
            const double v = s.value_at(xm, R);
            const double mv = apply_exploration_operator(p, g.x_nodes, value, xm, R);
            rep.max_exploration_residual = std::max(rep.max_exploration_residual, std::abs(v - mv) / v);
            ++rep.exploration_nodes;
        }
    }

    // classic form lambda (V(x,R+a) - V(x,R)) - V_x - k: zero when exploring, <= 0 when consuming
    for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double xs[3] = {g.x_nodes[i - 1], g.x_nodes[i], g.x_nodes[i + 1]};
        const auto lo = s.v_row(i - 1);
        const auto mid = s.v_row(i);
        const auto hi = s.v_row(i + 1);
        for (std::size_t j = 0; j < g.n_r; ++j) {
            const double R = g.r_node(j);
            const bool exploring = R <= f.r_star[i + 1];
            const bool consuming = R > f.r_star[i - 1];
            if (!exploring && !consuming) continue;
            const double ys[3] = {lo[j], mid[j], hi[j]};
            const double v_x = numerics::quadratic_derivative(xs, ys, xs[1]);
            const double jump = p.lambda * (mid[j + g.shift] - mid[j]);
            const double defect = jump - v_x - p.k;
            const double scale = p.k + std::abs(v_x) + std::abs(jump);
            const double res = exploring ? std::abs(defect) / scale : std::max(defect, 0.0) / scale;
            rep.max_classic_residual = std::max(rep.max_classic_residual, res);
            ++rep.classic_nodes;
        }
    }

    // smooth pasting: one-sided three-node differences on each side of R*. Below the frontier the
    // e^{-lambda x} U(R) part of MV, singular at R = 0, is differentiated exactly.
    for (std::size_t i = 1; i < nx; ++i) {
        const double rs = f.r_star[i];
        const auto top = static_cast<std::size_t>(std::floor(rs / h));
        if (top < 2 || top + 3 >= g.n_ext()) continue;
        const double surviving = std::exp(-p.lambda * g.x_nodes[i]);
        const auto v = s.v_row(i);
        double xl[3];
        double yl[3];
        for (std::size_t m = 0; m < 3; ++m) {
            const std::size_t j = top - 2 + m;
            xl[m] = g.r_node(j);
            yl[m] = v[j] - surviving * hotelling_value(p, xl[m]);
        }
        double xr[3];
        double yr[3];
        for (std::size_t m = 0; m < 3; ++m) {
            xr[m] = g.r_node(top + 1 + m);
            yr[m] = v[top + 1 + m];
        }
        const double left = numerics::quadratic_derivative(xl, yl, rs) + surviving * hotelling_price(p, rs);
        const double right = numerics::quadratic_derivative(xr, yr, rs);
        rep.smooth_pasting_gap = std::max(rep.smooth_pasting_gap, std::abs(left - right) / std::abs(right));
        ++rep.pasting_rows;
    }
    return rep;
}

}  // namespace hotelling
