#pragma once

// Model primitives: CRRA utility u(c) = c^alpha / alpha, the Hotelling cake-eating value
// U(R) and its price, the convex conjugate u*, and the full-information (k = 0) value.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hotelling/errors.hpp"

namespace hotelling {

/// Derived constants; a pure function of the five primitives.
struct DerivedConstants {
    double epsilon = 0.0;      ///< k / (lambda U(a)), in [0, 1] for admissible parameters
    double c_star = 0.0;       ///< slope of U^{1/alpha}: (1/alpha) (alpha r / (1-alpha))^{1 - 1/alpha}
    double u_prefactor = 0.0;  ///< ((1-alpha)/r)^{1-alpha} / alpha, so U(R) = u_prefactor R^alpha
};

/// The five model primitives. Construct through validate(); a default-constructed value is not usable.
struct ModelParams {
    double alpha = 0.0;   ///< utility curvature, in (0, 1)
    double r = 0.0;       ///< interest rate
    double a = 0.0;       ///< deposit size
    double lambda = 0.0;  ///< discovery intensity per unit area
    double k = 0.0;       ///< exploration cost per unit area
    DerivedConstants derived{};
};

inline DerivedConstants derive_constants(double alpha, double r, double a, double lambda, double k) {
    DerivedConstants d;
    d.u_prefactor = std::pow((1.0 - alpha) / r, 1.0 - alpha) / alpha;
    d.c_star = std::pow(alpha * r / (1.0 - alpha), 1.0 - 1.0 / alpha) / alpha;
    d.epsilon = k / (lambda * d.u_prefactor * std::pow(a, alpha));
    return d;
}

/// Checks the domain and admissibility of raw parameters and attaches the derived constants.
inline ModelParams validate(double alpha, double r, double a, double lambda, double k) {
    std::ostringstream bad;
    if (!(alpha > 0.0 && alpha < 1.0)) bad << " alpha must lie in (0,1);";
    if (!(r > 0.0) || !std::isfinite(r)) bad << " r must be positive;";
    if (!(a > 0.0) || !std::isfinite(a)) bad << " a must be positive;";
    if (!(lambda > 0.0) || !std::isfinite(lambda)) bad << " lambda must be positive;";
    if (!(k >= 0.0) || !std::isfinite(k)) bad << " k must be non-negative;";
    if (!bad.str().empty()) throw DomainError("invalid model parameters:" + bad.str());

    ModelParams p{alpha, r, a, lambda, k, derive_constants(alpha, r, a, lambda, k)};
    if (p.derived.epsilon > 1.0) {
        std::ostringstream msg;
        msg << "U(a) = " << p.derived.u_prefactor * std::pow(a, alpha) << " is below k/lambda = "
            << k / lambda << ": exploration is never optimal at zero reserves";
        throw AdmissibilityError(msg.str());
    }
    return p;
}

inline ModelParams validate(const ModelParams& raw) {
    return validate(raw.alpha, raw.r, raw.a, raw.lambda, raw.k);
}

/// Flow utility c^alpha / alpha.
inline double utility(const ModelParams& p, double c) {
    if (c < 0.0) throw DomainError("utility: negative consumption");
    return std::pow(c, p.alpha) / p.alpha;
}

/// u*(p) = sup_c {u(c) - c p} = ((1-alpha)/alpha) p^{alpha/(alpha-1)}.
inline double conjugate(const ModelParams& p, double price) {
    if (!(price > 0.0)) throw DomainError("conjugate: price must be positive");
    return (1.0 - p.alpha) / p.alpha * std::pow(price, p.alpha / (p.alpha - 1.0));
}

/// u1 = (u*)^{-1}: u1(y) = (alpha y / (1-alpha))^{1 - 1/alpha}.
inline double conjugate_inverse(const ModelParams& p, double y) {
    if (!(y > 0.0)) throw DomainError("conjugate_inverse: argument must be positive");
    return std::pow(p.alpha * y / (1.0 - p.alpha), 1.0 - 1.0 / p.alpha);
}

/// Present value of optimally consuming a known stock R: U(R) = ((1-alpha)/r)^{1-alpha} R^alpha / alpha.
inline double hotelling_value(const ModelParams& p, double reserves) {
    if (reserves < 0.0) throw DomainError("hotelling_value: negative reserves");
    return p.derived.u_prefactor * std::pow(reserves, p.alpha);
}

/// Hotelling price U'(R); diverges at zero reserves.
inline double hotelling_price(const ModelParams& p, double reserves) {
    if (!(reserves > 0.0)) throw DomainError("hotelling_price: reserves must be positive");
    return p.alpha * p.derived.u_prefactor * std::pow(reserves, p.alpha - 1.0);
}

/// Initial consumption rate of the Hotelling path for a stock R: c(t) = c0 e^{-r t/(1-alpha)}.
inline double hotelling_consumption(const ModelParams& p, double reserves) {
    return p.r / (1.0 - p.alpha) * reserves;
}

/// E[U(R + a N_x)] with N_x ~ Poisson(lambda x): the value when exploration is free.
/// Summation stops once the accumulated Poisson mass exceeds 1 - 1e-12 and the current term is
/// below truncation_tol; the remaining tail is then bounded by the tail mass times U(R + a n) growth.
inline double full_information_value(const ModelParams& p, double x, double reserves,
                                     double truncation_tol = 1e-14) {
    if (x < 0.0) throw DomainError("full_information_value: negative unexplored area");
    if (reserves < 0.0) throw DomainError("full_information_value: negative reserves");
    const double mean = p.lambda * x;
    if (mean == 0.0) return hotelling_value(p, reserves);

    // Start the recursion at the mode and walk outwards so large means do not underflow e^{-mean}.
    const auto mode = static_cast<long>(std::floor(mean));
    const double log_pmf_mode = -mean + static_cast<double>(mode) * std::log(mean) -
                                std::lgamma(static_cast<double>(mode) + 1.0);
    const double pmf_mode = std::exp(log_pmf_mode);

    double total = 0.0;
    double mass = 0.0;
    // downward n = mode, mode-1, ..., 0
    double pmf = pmf_mode;
    for (long n = mode; n >= 0; --n) {
        total += pmf * hotelling_value(p, reserves + p.a * static_cast<double>(n));
        mass += pmf;
        if (n > 0) pmf *= static_cast<double>(n) / mean;
        if (pmf == 0.0) break;
    }
    // upward n = mode+1, ...
    pmf = pmf_mode;
    for (long n = mode + 1;; ++n) {
        pmf *= mean / static_cast<double>(n);
        const double term = pmf * hotelling_value(p, reserves + p.a * static_cast<double>(n));
        total += term;
        mass += pmf;
        if (mass > 1.0 - 1e-12 && term < truncation_tol) break;
        if (n > mode + 100000) throw ConvergenceError("full_information_value: Poisson series did not converge");
    }
    return total;
}

}  // namespace hotelling
