#pragma once

// Value function V(x, R) of the exploration problem, computed by marching in unexplored area x.
//
// At each new x node the exploration operator MV(x, .) is formed from the rows already solved,
// the frontier R*(x) is located with the test g(x, R) = d/dR MV^{1/alpha} < c, and the row is set
// to MV below the frontier and to the consumption-region closed form
//   V(x, R) = (MV(x, R*)^{1/alpha} + c (R - R*))^alpha
// above it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/exploration_operator.hpp"
#include "hotelling/frontier_bounds.hpp"
#include "hotelling/grid.hpp"
#include "hotelling/model.hpp"
#include "hotelling/numerics.hpp"

namespace hotelling {

/// Closed form of V above the frontier: (anchor^{1/alpha} + c (R - R*))^alpha.
inline double consumption_extension(const ModelParams& p, double anchor_value, double r_star, double R) {
    if (!(anchor_value > 0.0)) throw DomainError("consumption_extension: anchor must be positive");
    return std::pow(std::pow(anchor_value, 1.0 / p.alpha) + p.derived.c_star * (R - r_star), p.alpha);
}

/// dV/dR of the closed form: alpha c (anchor^{1/alpha} + c (R - R*))^{alpha-1}.
inline double consumption_extension_price(const ModelParams& p, double anchor_value, double r_star, double R) {
    const double base = std::pow(anchor_value, 1.0 / p.alpha) + p.derived.c_star * (R - r_star);
    return p.alpha * p.derived.c_star * std::pow(base, p.alpha - 1.0);
}

/// g(R) = d/dR [MV(R)^{1/alpha}] by central difference with step h (forward difference when R < h).
template <class MvFn>
double indicator_from(const ModelParams& p, MvFn&& mv, double R, double h) {
    auto power = [&](double r) {
        const double v = mv(r);
        if (!(v > 0.0)) throw DomainError("frontier indicator: MV must be positive");
        return std::pow(v, 1.0 / p.alpha);
    };
    if (R >= h) return (power(R + h) - power(R - h)) / (2.0 * h);
    return (power(R + h) - power(R)) / h;
}

/// Frontier samples on the x nodes. Entry 0 is the x = 0 anchor R*(0).
struct Frontier {
    std::vector<double> x_nodes;
    std::vector<double> r_star;
    std::vector<double> p_star;  ///< critical price dV/dR at (x, R*(x))
    std::vector<double> v_star;  ///< V(x, R*(x))
    double r0 = 0.0;

    std::size_t size() const { return x_nodes.size(); }
};

struct SolveOptions {
    double fixed_point_tol = 1e-14;
    int max_fixed_point_iterations = 200;
    double bisection_tol_fraction = 1e-10;  ///< frontier bisection stops at this fraction of r_step
    double monotone_tol_fraction = 0.1;     ///< allowed increase of R*(x) in x, as a fraction of r_step
};

class ValueSurface;
ValueSurface solve(const ModelParams& p, const SolverGrid& grid, const SolveOptions& opts = {});

/// Solved value function. Immutable once returned by solve(); safe to share across threads.
class ValueSurface {
public:
    const ModelParams& params() const { return params_; }
    const SolverGrid& grid() const { return grid_; }
    const Frontier& frontier() const { return frontier_; }

    /// V on the extended reserve range of row i.
    std::span<const double> v_row(std::size_t i) const { return {v_.data() + i * grid_.n_ext(), grid_.n_ext()}; }
    /// MV on the reserve nodes of row i (R <= r_max).
    std::span<const double> mv_row(std::size_t i) const { return {mv_.data() + i * grid_.n_r, grid_.n_r}; }
    /// int_0^{x_i} V(y, R') lambda e^{-lambda (x_i - y)} dy on the extended reserve range of row i.
    std::span<const double> kernel_row(std::size_t i) const {
        return {kernel_.data() + i * grid_.n_ext(), grid_.n_ext()};
    }

    bool in_exploration_region(std::size_t i, double R) const { return i > 0 && R <= frontier_.r_star[i]; }

    /// MV(x_i, R) for continuous R in [0, r_max]; exact at nodes.
    double row_exploration_value(std::size_t i, double R) const {
        if (i == 0) return hotelling_value(params_, R);
        const double x = grid_.x_nodes[i];
        return numerics::cubic_uniform(kernel_row(i), grid_.r_step, R + params_.a) +
               hotelling_value(params_, R) * std::exp(-params_.lambda * x) - exploration_cost_term(params_, x);
    }

    /// V(x_i, R) for any R >= 0.
    double row_value(std::size_t i, double R) const {
        if (R < 0.0) throw DomainError("value: negative reserves");
        if (i == 0) return hotelling_value(params_, R);
        if (R > frontier_.r_star[i]) {
            return consumption_extension(params_, frontier_.v_star[i], frontier_.r_star[i], R);
        }
        return row_exploration_value(i, R);
    }

    /// dV/dR at (x_i, R). Closed form above the frontier; below it, a central difference of the
    /// smooth kernel part of MV plus the exact derivative of the e^{-lambda x} U(R) term.
    double row_price(std::size_t i, double R) const {
        if (!(R > 0.0)) throw DomainError("price: reserves must be positive");
        if (i == 0) return hotelling_price(params_, R);
        if (R > frontier_.r_star[i]) {
            return consumption_extension_price(params_, frontier_.v_star[i], frontier_.r_star[i], R);
        }
        const double slope = numerics::central_slope(kernel_row(i), grid_.r_step, R + params_.a);
        return slope + hotelling_price(params_, R) * std::exp(-params_.lambda * grid_.x_nodes[i]);
    }

    /// R*(x), piecewise linear between nodes.
    double frontier_at(double x) const {
        const auto [i, t] = locate(x);
        if (t == 0.0) return frontier_.r_star[i];
        return (1.0 - t) * frontier_.r_star[i] + t * frontier_.r_star[i + 1];
    }

    /// Shift s(x) such that V(x, R) = (c (R + s(x)))^alpha above the frontier; linear between nodes.
    double consumption_shift_at(double x) const {
        const auto [i, t] = locate(x);
        if (t == 0.0) return shift_[i];
        return (1.0 - t) * shift_[i] + t * shift_[i + 1];
    }

    /// V(x, R): the consumption closed form above R*(x) (with interpolated shift between nodes),
    /// and linear interpolation in x of the node rows below it.
    double value_at(double x, double R) const {
        if (R < 0.0) throw DomainError("value_at: negative reserves");
        const auto [i, t] = locate(x);
        if (t == 0.0) return row_value(i, R);
        if (R > frontier_at(x)) {
            return std::pow(params_.derived.c_star * (R + consumption_shift_at(x)), params_.alpha);
        }
        return (1.0 - t) * row_value(i, R) + t * row_value(i + 1, R);
    }

    /// Shadow price dV/dR at (x, R), interpolated like value_at.
    double price_at(double x, double R) const {
        if (!(R > 0.0)) throw DomainError("price_at: reserves must be positive");
        const auto [i, t] = locate(x);
        if (t == 0.0) return row_price(i, R);
        if (R > frontier_at(x)) {
            const double base = params_.derived.c_star * (R + consumption_shift_at(x));
            return params_.alpha * params_.derived.c_star * std::pow(base, params_.alpha - 1.0);
        }
        return (1.0 - t) * row_price(i, R) + t * row_price(i + 1, R);
    }

    /// Node index i and weight t in [0, 1) with x = (1-t) x_i + t x_{i+1}.
    std::pair<std::size_t, double> locate(double x) const {
        const auto& xs = grid_.x_nodes;
        if (x < 0.0 || x > xs.back() * (1.0 + 1e-12) + 1e-15) {
            std::ostringstream msg;
            msg << "x = " << x << " outside the solved range [0, " << xs.back() << "]";
            throw GridError(msg.str());
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const auto i = static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1;
        if (i + 1 >= xs.size() || x == xs[i]) return {std::min(i, xs.size() - 1), 0.0};
        return {i, (x - xs[i]) / (xs[i + 1] - xs[i])};
    }

private:
    friend ValueSurface solve(const ModelParams& p, const SolverGrid& grid, const SolveOptions& opts);

    ModelParams params_;
    SolverGrid grid_;
    Frontier frontier_;
    std::vector<double> v_;
    std::vector<double> mv_;
    std::vector<double> kernel_;
    std::vector<double> shift_;
};

namespace detail {

/// Locates inf{R : excess(R) < 0} on the reserve nodes 1 .. n_r-2, then refines by bisection.
template <class ExcessFn>
double locate_frontier(const SolverGrid& grid, ExcessFn&& excess, double x, double abs_tol) {
    double prev = excess(0.0);
    for (std::size_t j = 1; j + 1 < grid.n_r; ++j) {
        const double R = grid.r_node(j);
        const double cur = excess(R);
        if (cur < 0.0) {
            if (prev < 0.0) {
                std::ostringstream msg;
                msg << "frontier at x = " << x << " lies at or below the first reserve node";
                throw FrontierNotBracketed(msg.str());
            }
            return numerics::bisect(excess, grid.r_node(j - 1), R, abs_tol);
        }
        prev = cur;
    }
    std::ostringstream msg;
    msg << "g - c keeps its sign on [0, " << grid.r_max() << "] at x = " << x << "; extend the reserve grid";
    throw FrontierNotBracketed(msg.str());
}

}  // namespace detail

/// Marches x from 0 to x_max. Requires k > 0; with free exploration the frontier is at infinity and
/// full_information_value gives the value directly.
inline ValueSurface solve(const ModelParams& p, const SolverGrid& grid, const SolveOptions& opts) {
    if (!(p.k > 0.0)) {
        throw DomainError("solve: k = 0 puts the frontier at infinity; use full_information_value");
    }
    check_grid(p, grid);

    ValueSurface s;
    s.params_ = p;
    s.grid_ = grid;
    const std::size_t nx = grid.n_x();
    const std::size_t ne = grid.n_ext();
    const std::size_t nr = grid.n_r;
    const double c = p.derived.c_star;
    s.v_.assign(nx * ne, 0.0);
    s.mv_.assign(nx * nr, 0.0);
    s.kernel_.assign(nx * ne, 0.0);
    s.shift_.assign(nx, 0.0);

    Frontier& f = s.frontier_;
    f.x_nodes = grid.x_nodes;
    f.r_star.assign(nx, 0.0);
    f.p_star.assign(nx, 0.0);
    f.v_star.assign(nx, 0.0);
    f.r0 = frontier_at_zero(p);

    for (std::size_t j = 0; j < ne; ++j) s.v_[j] = hotelling_value(p, grid.r_node(j));
    for (std::size_t j = 0; j < nr; ++j) s.mv_[j] = s.v_[j];
    f.r_star[0] = f.r0;
    f.v_star[0] = hotelling_value(p, f.r0);
    f.p_star[0] = hotelling_price(p, f.r0);
    s.shift_[0] = std::pow(f.v_star[0], 1.0 / p.alpha) / c - f.r0;  // zero up to rounding

    std::vector<double> current(ne);
    std::vector<double> next(ne);
    const double abs_tol = opts.bisection_tol_fraction * grid.r_step;

    for (std::size_t i = 1; i < nx; ++i) {
        const double x = grid.x_nodes[i];
        const double h = x - grid.x_nodes[i - 1];
        const double decay = std::exp(-p.lambda * h);
        const auto w = numerics::exponential_segment_weights(p.lambda, h);
        const double surviving = std::exp(-p.lambda * x);
        const double cost = exploration_cost_term(p, x);

        const double* prev_v = s.v_.data() + (i - 1) * ne;
        const double* prev_k = s.kernel_.data() + (i - 1) * ne;
        double* kernel = s.kernel_.data() + i * ne;
        double* mv = s.mv_.data() + i * nr;
        const std::span<const double> kernel_view(kernel, ne);

        auto mv_at = [&](double R) {
            return numerics::cubic_uniform(kernel_view, grid.r_step, R + p.a) + hotelling_value(p, R) * surviving -
                   cost;
        };

        // g - c with the e^{-lambda x} U(R) part of MV differentiated exactly; it is singular at R = 0
        auto excess = [&](double R) {
            if (!(R > 0.0)) return std::numeric_limits<double>::infinity();
            const double slope = numerics::central_slope(kernel_view, grid.r_step, R + p.a);
            const double dmv = slope + hotelling_price(p, R) * surviving;
            const double v = mv_at(R);
            if (!(v > 0.0)) throw DomainError("frontier indicator: MV must be positive");
            return std::pow(v, 1.0 / p.alpha - 1.0) * dmv / p.alpha - c;
        };

        // V(x_i, .) enters its own kernel through the s = 0 end of the last segment; iterate to the fixed point.
        std::copy(prev_v, prev_v + ne, current.begin());
        double r_star = 0.0;
        double anchor = 0.0;
        bool converged = false;
        for (int it = 0; it < opts.max_fixed_point_iterations; ++it) {
            for (std::size_t j = 0; j < ne; ++j) {
                kernel[j] = decay * prev_k[j] + w.far * prev_v[j] + w.near * current[j];
            }
            for (std::size_t j = 0; j < nr; ++j) {
                mv[j] = kernel[j + grid.shift] + hotelling_value(p, grid.r_node(j)) * surviving - cost;
            }
            r_star = detail::locate_frontier(grid, excess, x, abs_tol);
            anchor = mv_at(r_star);

            double change = 0.0;
            for (std::size_t j = 0; j < ne; ++j) {
                const double R = grid.r_node(j);
                if (R <= r_star) {
                    next[j] = mv[j];  // r_star < r_max, so j < n_r here
                } else {
                    next[j] = consumption_extension(p, anchor, r_star, R);
                }
                change = std::max(change, std::abs(next[j] - current[j]) / std::max(next[j], 1e-300));
            }
            current.swap(next);
            if (change <= opts.fixed_point_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "value row at x = " << x << " did not reach its fixed point";
            throw ConvergenceError(msg.str());
        }
        // final kernel/MV consistent with the converged row
        for (std::size_t j = 0; j < ne; ++j) kernel[j] = decay * prev_k[j] + w.far * prev_v[j] + w.near * current[j];
        for (std::size_t j = 0; j < nr; ++j) {
            mv[j] = kernel[j + grid.shift] + hotelling_value(p, grid.r_node(j)) * surviving - cost;
        }
        std::copy(current.begin(), current.end(), s.v_.begin() + static_cast<std::ptrdiff_t>(i * ne));

        if (r_star > f.r_star[i - 1] + opts.monotone_tol_fraction * grid.r_step) {
            std::ostringstream msg;
            msg << "R*(x) rises from " << f.r_star[i - 1] << " to " << r_star << " at x = " << x
                << "; refine the grid";
            throw NonMonotoneFrontier(msg.str());
        }
        f.r_star[i] = r_star;
        f.v_star[i] = anchor;
        f.p_star[i] = consumption_extension_price(p, anchor, r_star, r_star);
        s.shift_[i] = std::pow(anchor, 1.0 / p.alpha) / c - r_star;
    }
    return s;
}

/// g(x, R) = d/dR MV(x, R)^{1/alpha}; the frontier test is g < c_star. Off-node x, or R + a beyond
/// the tabulated kernel, evaluates MV with the generic exploration operator on the solved surface.
inline double frontier_indicator(const ValueSurface& s, double x, double R) {
    const auto& p = s.params();
    const auto& g = s.grid();
    const auto [i, t] = s.locate(x);
    const bool tabulated = R + p.a + g.r_step <= g.r_step * static_cast<double>(g.n_ext() - 1);
    if (t == 0.0 && tabulated) {
        return indicator_from(p, [&](double r) { return s.row_exploration_value(i, r); }, R, s.grid().r_step);
    }
    auto value = [&](double y, double r) { return s.value_at(y, r); };
    auto mv = [&](double r) { return apply_exploration_operator(p, s.grid().x_nodes, value, x, r); };
    return indicator_from(p, mv, R, s.grid().r_step);
}

}  // namespace hotelling
