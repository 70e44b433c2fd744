#pragma once

// Analytic facts about the exploration frontier R*(x): its limit at exhaustion, and the a-priori
// curves that must bracket it.

#include <cmath>

#include "hotelling/errors.hpp"
#include "hotelling/model.hpp"
#include "hotelling/numerics.hpp"

namespace hotelling {

/// Left side minus one of the equation defining R*(0), written in y = a / R0:
/// alpha (1+y)^{alpha-1} + (1-alpha)(1+y)^alpha - (1-alpha) y^alpha eps - 1.
inline double frontier_at_zero_equation(double alpha, double epsilon, double y) {
    return alpha * std::pow(1.0 + y, alpha - 1.0) + (1.0 - alpha) * std::pow(1.0 + y, alpha) -
           (1.0 - alpha) * std::pow(y, alpha) * epsilon - 1.0;
}

/// R*(0): the frontier in the limit of vanishing unexplored area.
/// Requires 0 < eps < 1. The equation is negative for small y and positive for large y.
inline double frontier_at_zero(const ModelParams& p, double rel_tol = 1e-12) {
    const double eps = p.derived.epsilon;
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("frontier_at_zero: requires 0 < epsilon < 1");
    }
    auto h = [&](double log_y) { return frontier_at_zero_equation(p.alpha, eps, std::exp(log_y)); };

    // Geometric scan of y over [1e-12, 1e12] for the first sign change.
    const double lo_log = std::log(1e-12);
    const double hi_log = std::log(1e12);
    constexpr int n_scan = 480;
    double prev_log = lo_log;
    double prev = h(prev_log);
    for (int i = 1; i <= n_scan; ++i) {
        const double cur_log = lo_log + (hi_log - lo_log) * i / n_scan;
        const double cur = h(cur_log);
        if ((prev > 0.0) != (cur > 0.0)) {
            const double log_y = numerics::bisect(h, prev_log, cur_log, rel_tol);
            return p.a / std::exp(log_y);
        }
        prev_log = cur_log;
        prev = cur;
    }
    throw NoRoot("frontier_at_zero: no sign change for a/R0 in [1e-12, 1e12]");
}

/// Rbar(x): every R <= Rbar(x) belongs to the exploration region.
/// Largest R with (1-e^{-lambda x})(U(R+a) - k/lambda) - (e^{alpha lambda x/(1-alpha)} - e^{-lambda x}) U(R) > 0.
/// At x = 0 the limiting curve (1-alpha)(U(R+a) - k/lambda) > U(R) is used.
inline double lower_frontier_bound(const ModelParams& p, double x) {
    if (x < 0.0) throw DomainError("lower_frontier_bound: negative area");
    const double kl = p.k / p.lambda;
    auto f = [&](double R) {
        if (x == 0.0) {
            return (1.0 - p.alpha) * (hotelling_value(p, R + p.a) - kl) - hotelling_value(p, R);
        }
        const double found = -std::expm1(-p.lambda * x);
        // e^{alpha lambda x/(1-alpha)} - e^{-lambda x}, written to keep precision for small x
        const double spread = std::expm1(p.alpha * p.lambda * x / (1.0 - p.alpha)) - std::expm1(-p.lambda * x);
        return found * (hotelling_value(p, R + p.a) - kl) - spread * hotelling_value(p, R);
    };
    // f(0) >= 0 by admissibility and f < 0 for large R; walk down from a large R to the last crossing.
    double hi = 1e12 * p.a;
    if (f(hi) > 0.0) throw NoRoot("lower_frontier_bound: curve does not turn negative");
    double lo = hi;
    while (true) {
        lo *= 0.5;
        if (lo < 1e-300) return 0.0;
        if (f(lo) > 0.0) break;
        hi = lo;
    }
    return numerics::bisect(f, lo, hi, 1e-14 * hi);
}

/// Rcheck: every R >= Rcheck is in the consumption region for all x in [0, x_max]. Comes from
/// bounding MV by U(R) + integral of {a U'(R)(1 + lambda(x-h)) - k/lambda} lambda e^{-lambda h} dh,
/// whose integral is a U'(R) lambda x - (k/lambda)(1 - e^{-lambda x}). The binding x is x_max.
inline double upper_frontier_bound(const ModelParams& p, double x_max) {
    if (!(x_max > 0.0)) throw DomainError("upper_frontier_bound: x_max must be positive");
    if (!(p.k > 0.0)) throw DomainError("upper_frontier_bound: requires k > 0");
    const double price_cap = p.k * (-std::expm1(-p.lambda * x_max)) / (p.a * p.lambda * p.lambda * x_max);
    // U'(R) = alpha * u_prefactor * R^{alpha-1} = price_cap
    return std::pow(price_cap / (p.alpha * p.derived.u_prefactor), 1.0 / (p.alpha - 1.0));
}

/// First-order condition for the frontier as x -> 0: evaluated at R*(x) this is O(x).
/// ((1-alpha)/alpha) (lambda (U(R+a) - U(R)) - k) / U(R) + lambda (U'(R+a) - U'(R)) / U'(R).
inline double small_area_frontier_condition(const ModelParams& p, double R) {
    const double u = hotelling_value(p, R);
    const double du = hotelling_price(p, R);
    return (1.0 - p.alpha) / p.alpha * (p.lambda * (hotelling_value(p, R + p.a) - u) - p.k) / u +
           p.lambda * (hotelling_price(p, R + p.a) - du) / du;
}

}  // namespace hotelling
