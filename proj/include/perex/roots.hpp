#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "perex/errors.hpp"

namespace perex {

struct RootResult {
    double root = 0.0;
    double residual = 0.0;  // |f(root)|
    int iterations = 0;
};

/// Bracketed bisection with safeguarded Newton steps.
///
/// `fn(x)` must return a pair-like `{value, derivative}` and change sign on
/// [lo, hi]. A Newton step is taken only when it lands strictly inside the
/// current bracket; otherwise the bracket is halved. Iteration stops once
/// |f| <= abs_tol or the bracket has collapsed to a few ulps.
template <class Fn>
RootResult solve_bracketed(Fn&& fn, double lo, double hi, double abs_tol, int max_iter = 400) {
    auto [flo, dlo] = fn(lo);
    auto [fhi, dhi] = fn(hi);
    (void)dlo;
    (void)dhi;
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo < 0.0) == (fhi < 0.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "root not bracketed on [%.17g, %.17g] (f = %.3g, %.3g)", lo, hi, flo, fhi);
        throw DomainError(buf);
    }
    const bool increasing = flo < 0.0;

    double x = 0.5 * (lo + hi);
    double best_x = std::fabs(flo) < std::fabs(fhi) ? lo : hi;
    double best_f = std::fmin(std::fabs(flo), std::fabs(fhi));
    for (int it = 1; it <= max_iter; ++it) {
        auto [fx, dfx] = fn(x);
        if (std::fabs(fx) < best_f) {
            best_f = std::fabs(fx);
            best_x = x;
        }
        if (std::fabs(fx) <= abs_tol) return {x, std::fabs(fx), it};

        if ((fx < 0.0) == increasing)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(std::fabs(lo), std::fabs(hi)) +
                           std::numeric_limits<double>::min())
            return {best_x, best_f, it};

        double next = 0.5 * (lo + hi);
        if (dfx != 0.0 && std::isfinite(dfx)) {
            const double newton = x - fx / dfx;
            if (newton > lo && newton < hi) next = newton;
        }
        x = next;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "no convergence after %d iterations: bracket [%.17g, %.17g], best residual %.3g",
                  max_iter, lo, hi, best_f);
    throw ConvergenceError(buf);
}

}  // namespace perex
