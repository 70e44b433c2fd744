#pragma once

#include <cmath>
#include <span>

#include "hotelling/errors.hpp"
#include "hotelling/model.hpp"
#include "hotelling/numerics.hpp"

namespace hotelling {

/// Expected discounted exploration cost of one episode started at unexplored area x:
/// k (1 - e^{-lambda x}) / lambda.
inline double exploration_cost_term(const ModelParams& p, double x) {
    return p.k * (-std::expm1(-p.lambda * x)) / p.lambda;
}

/// MV(x, R) = int_0^x V(x-s, R+a) lambda e^{-lambda s} ds + U(R) e^{-lambda x} - k (1 - e^{-lambda x}) / lambda.
///
/// `value(y, R)` supplies V. The integrand y -> V(y, R+a) is replaced by its piecewise-linear
/// interpolant on the knots {x_nodes < x} together with x itself, and integrated exactly against
/// the exponential kernel.
template <class ValueFn>
double apply_exploration_operator(const ModelParams& p, std::span<const double> x_nodes, ValueFn&& value,
                                  double x, double R) {
    if (x < 0.0) throw DomainError("exploration operator: negative area");
    if (R < 0.0) throw DomainError("exploration operator: negative reserves");
    if (x_nodes.empty() || x > x_nodes.back() * (1.0 + 1e-12) + 1e-15) {
        throw GridError("exploration operator: x exceeds the solved range");
    }
    const double shifted = R + p.a;
    numerics::CompensatedSum integral;
    double upper = x;  // right knot of the current segment
    double f_upper = x > 0.0 ? value(x, shifted) : 0.0;
    // walk segments from y = x downwards; each contributes e^{-lambda (x - upper)} (near f_upper + far f_lower)
    for (std::size_t idx = x_nodes.size(); idx-- > 0;) {
        const double lower = x_nodes[idx];
        if (!(lower < upper)) continue;
        const double f_lower = value(lower, shifted);
        const auto w = numerics::exponential_segment_weights(p.lambda, upper - lower);
        const double decay = std::exp(-p.lambda * (x - upper));
        integral.add(decay * (w.near * f_upper + w.far * f_lower));
        upper = lower;
        f_upper = f_lower;
    }
    return integral.value() + hotelling_value(p, R) * std::exp(-p.lambda * x) - exploration_cost_term(p, x);
}

}  // namespace hotelling
