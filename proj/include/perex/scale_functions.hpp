#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <vector>

#include "perex/errors.hpp"
#include "perex/levy_model.hpp"
#include "perex/roots.hpp"

namespace perex {

namespace detail {

/// expm1(z) / z, continuous at 0.
inline double expm1_ratio(double z) {
    if (std::fabs(z) < 1e-5) return 1.0 + z * (0.5 + z / 6.0);
    return std::expm1(z) / z;
}

}  // namespace detail

/// (e^{a x} - e^{b x}) / (a - b), with the limit x e^{a x} at a == b.
inline double exp_divided_difference(double a, double b, double x) {
    // Factor out the larger exponential; the remaining expm1 argument is <= 0.
    const double hi = a * x >= b * x ? a : b;
    const double lo = a * x >= b * x ? b : a;
    return std::exp(hi * x) * x * detail::expm1_ratio((lo - hi) * x);
}

/// Exponential-mixture representation of the q-scale function of an
/// exponential-jump spectrally negative process:
///
///     W^(q)(x) = sum_i weights[i] * exp(roots[i] * x),   x >= 0,
///
/// where roots are the (real, simple) solutions of psi(theta) = q and
/// weights[i] = 1 / psi'(roots[i]). roots[0] is always Phi(q).
///
/// Because psi is rational, psi(theta) - q = lead(theta) * prod_k (theta - roots[k])
/// with lead(theta) = L / (rho + theta) (L / 1 without jumps). Z and the pricer
/// kernels use that factorisation so that removable points such as
/// psi(theta) = q never divide zero by zero.
struct ScaleBasis {
    double q = 0.0;
    std::vector<double> roots;
    std::vector<double> weights;
    LevyModel model;  // SN representation the basis was built from

    double phi() const { return roots.front(); }

    double lead(double theta) const {
        if (model.jump_rate > 0.0) {
            const double top = model.sigma > 0.0 ? 0.5 * model.sigma * model.sigma : model.drift;
            return top / (model.jump_param + theta);
        }
        return 0.5 * model.sigma * model.sigma;
    }

    /// (psi(theta) - q) / (theta - roots[skip]), exact at theta == roots[skip].
    double reduced(double theta, std::size_t skip) const {
        double value = lead(theta);
        for (std::size_t k = 0; k < roots.size(); ++k)
            if (k != skip) value *= theta - roots[k];
        return value;
    }
};

namespace detail {

/// (psi(theta) - q) * (rho + theta); a polynomial, so no pole at -rho.
inline std::pair<double, double> cleared_exponent(const LevyModel& sn, double q, double theta) {
    const double s2 = 0.5 * sn.sigma * sn.sigma;
    const double inner = sn.drift * theta + s2 * theta * theta - sn.jump_rate - q;
    const double inner_d = sn.drift + 2.0 * s2 * theta;
    const double lin = sn.jump_param + theta;
    return {inner * lin + sn.jump_rate * sn.jump_param, inner_d * lin + inner};
}

}  // namespace detail

inline ScaleBasis build_scale_basis(const LevyModel& model, double q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("build_scale_basis: q must be positive and finite");
    const LevyModel sn = model.sn_view();
    sn.validate();

    ScaleBasis basis;
    basis.q = q;
    basis.model = sn;
    basis.roots.push_back(phi(sn, q));

    const double root_tol = 1e-14;
    auto cleared = [&](double t) { return detail::cleared_exponent(sn, q, t); };
    if (sn.jump_rate > 0.0) {
        const double rho = sn.jump_param;
        // cleared(-rho) = eta * rho > 0 and cleared(0) = -q * rho < 0.
        basis.roots.push_back(solve_bracketed(cleared, -rho, 0.0, root_tol * rho).root);
        if (sn.sigma > 0.0) {
            // Cubic with positive leading coefficient: negative at -infinity.
            double lo = -rho - 1.0;
            while (cleared(lo).first >= 0.0) lo = -rho + 2.0 * (lo + rho);
            basis.roots.push_back(solve_bracketed(cleared, lo, -rho, root_tol * rho).root);
        }
    } else {
        // sigma^2/2 * theta^2 + c theta - q: product of the roots is -2q/sigma^2.
        basis.roots.push_back(-2.0 * q / (sn.sigma * sn.sigma * basis.roots.front()));
    }

    std::vector<double> sorted = basis.roots;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - sorted[i - 1] < 1e-8) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "build_scale_basis: near-multiple roots %.17g and %.17g of psi = %.17g; perturb the parameters",
                          sorted[i - 1], sorted[i], q);
            throw DomainError(buf);
        }
    }
    for (double z : basis.roots) basis.weights.push_back(1.0 / sn.log_mgf_prime(z));
    return basis;
}

/// q-scale function; zero on the negative half-line.
inline double W(const ScaleBasis& basis, double x) {
    if (x < 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < basis.roots.size(); ++i) sum += basis.weights[i] * std::exp(basis.roots[i] * x);
    return sum;
}

/// int_0^x e^{theta y} W(x - y) dy.
inline double int_exp_W(const ScaleBasis& basis, double x, double theta) {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < basis.roots.size(); ++i)
        sum += basis.weights[i] * exp_divided_difference(theta, basis.roots[i], x);
    return sum;
}

/// int_0^x W(y) dy.
inline double W_bar(const ScaleBasis& basis, double x) { return int_exp_W(basis, x, 0.0); }

/// Z^(q)(x, theta) = e^{theta x} (1 + (q - psi(theta)) int_0^x e^{-theta z} W(z) dz).
///
/// For x > 0 the e^{theta x} component cancels exactly against the partial
/// fractions of 1/(psi - q), leaving sum_i w_i e^{r_i x} (psi(theta) - q)/(theta - r_i).
inline double Z(const ScaleBasis& basis, double x, double theta) {
    if (!basis.model.mgf_finite(theta)) throw DomainError("Z: theta outside the domain of psi");
    if (x <= 0.0) return std::exp(theta * x);
    double sum = 0.0;
    for (std::size_t i = 0; i < basis.roots.size(); ++i)
        sum += basis.weights[i] * std::exp(basis.roots[i] * x) * basis.reduced(theta, i);
    return sum;
}

}  // namespace perex
