#pragma once

// Small numerical kernels shared by the solver, the oracles and the simulator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "hotelling/errors.hpp"

namespace hotelling::numerics {

/// Neumaier compensated summation. Results are independent of the magnitude ordering of terms
/// up to the last ulp, which keeps ensemble reductions reproducible.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Bisection on a continuous f with f(lo) and f(hi) of opposite sign (zero counts as either).
/// Returns the midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double abs_tol, int max_iter = 200) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NoRoot("bisect: endpoints do not bracket a sign change");
    }
    for (int it = 0; it < max_iter && (hi - lo) > abs_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Returns (argmax, max). Endpoints are compared too, so monotone f is handled.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    std::pair<double, double> best = fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo > best.second) best = {lo, flo};
    if (fhi > best.second) best = {hi, fhi};
    return best;
}

/// Four-point Lagrange interpolation of samples on the uniform grid origin + i * step.
/// The stencil is shifted inward at the ends; queries outside the sampled range are rejected.
inline double cubic_uniform(std::span<const double> values, double step, double pos) {
    const std::size_t n = values.size();
    if (n == 0) throw GridError("cubic_uniform: empty table");
    const double u = pos / step;
    const double last = static_cast<double>(n - 1);
    if (u < -1e-9 || u > last + 1e-9) {
        throw GridError("cubic_uniform: query outside the tabulated range");
    }
    if (n < 4) {
        const auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, last - 1.0));
        const double t = u - static_cast<double>(i);
        return values[i] * (1.0 - t) + values[i + 1] * t;
    }
    const double near = std::round(u);
    if (std::abs(u - near) < 1e-12) {
        return values[static_cast<std::size_t>(near)];
    }
    std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
    i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
    const double t = u - static_cast<double>(i0);  // position relative to node i0, in [0, 3]
    const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    const auto i = static_cast<std::size_t>(i0);
    return l0 * values[i] + l1 * values[i + 1] + l2 * values[i + 2] + l3 * values[i + 3];
}

/// Derivative of the tabulated function at pos: five-point central difference of cubic_uniform with
/// spacing `step`, falling back to a two-point difference clamped to the table near its ends.
inline double central_slope(std::span<const double> values, double step, double pos) {
    const double top = step * static_cast<double>(values.size() - 1);
    if (pos - 2.0 * step >= 0.0 && pos + 2.0 * step <= top) {
        const double f_m2 = cubic_uniform(values, step, pos - 2.0 * step);
        const double f_m1 = cubic_uniform(values, step, pos - step);
        const double f_p1 = cubic_uniform(values, step, pos + step);
        const double f_p2 = cubic_uniform(values, step, pos + 2.0 * step);
        return (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * step);
    }
    const double lo = std::max(pos - step, 0.0);
    const double hi = std::min(pos + step, top);
    return (cubic_uniform(values, step, hi) - cubic_uniform(values, step, lo)) / (hi - lo);
}

/// Derivative at `at` of the quadratic through three points.
inline double quadratic_derivative(const double (&xs)[3], const double (&ys)[3], double at) {
    const double d0 = ((at - xs[1]) + (at - xs[2])) / ((xs[0] - xs[1]) * (xs[0] - xs[2]));
    const double d1 = ((at - xs[0]) + (at - xs[2])) / ((xs[1] - xs[0]) * (xs[1] - xs[2]));
    const double d2 = ((at - xs[0]) + (at - xs[1])) / ((xs[2] - xs[0]) * (xs[2] - xs[1]));
    return d0 * ys[0] + d1 * ys[1] + d2 * ys[2];
}

/// (1 - e^{-z}(1 + z)) / z, accurate for small z.
inline double ramp_kernel_weight(double z) {
    if (z < 0.25) {
        // sum_{n>=2} (-1)^n (n-1) z^{n-1} / n!
        double term = 1.0;  // z^{n-1} / n! at n = 1
        double total = 0.0;
        for (int n = 2; n < 30; ++n) {
            term *= z / n;
            const double contrib = (n % 2 == 0 ? 1.0 : -1.0) * (n - 1) * term;
            total += contrib;
            if (std::abs(contrib) < 1e-18 * std::abs(total)) break;
        }
        return total;
    }
    return (1.0 - std::exp(-z) * (1.0 + z)) / z;
}

/// Linear-interpolant quadrature weights against lambda e^{-lambda t} on t in [0, h]:
/// the integral of (f(0) (1 - t/h) + f(h) t/h) lambda e^{-lambda t} dt equals
/// near * f(0) + far * f(h).
struct SegmentWeights {
    double near;
    double far;
};

inline SegmentWeights exponential_segment_weights(double lambda, double h) {
    const double z = lambda * h;
    const double total = -std::expm1(-z);
    const double far = ramp_kernel_weight(z);
    return {total - far, far};
}

/// Type-7 sample quantile of sorted data.
inline double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw InsufficientData("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

}  // namespace hotelling::numerics
