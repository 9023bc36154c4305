#pragma once

// High-precision reference for the crossing identities, evaluated exactly as
// written (Z, W and the convolution) so the huge e^{Phi(r+lambda) y} terms
// cancel without loss. Roots are re-polished in 100 digits; integrals of the
// exponential mixture are done in closed form.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <vector>

#include "perex/periodic_pricer.hpp"

namespace hp_oracle {

using hp = boost::multiprecision::cpp_bin_float_100;

struct Model {
    hp c, s2, eta, rho;

    explicit Model(const perex::LevyModel& sn)
        : c(sn.drift), s2(hp(sn.sigma) * sn.sigma / 2), eta(sn.jump_rate), rho(sn.jump_param) {}

    hp psi(const hp& t) const { return c * t + s2 * t * t + eta * (rho / (rho + t) - 1); }
    hp psi_prime(const hp& t) const { return c + 2 * s2 * t - eta * rho / ((rho + t) * (rho + t)); }
};

struct Basis {
    hp q;
    std::vector<hp> roots, weights;
};

inline Basis polish(const Model& m, const perex::ScaleBasis& b, const hp& q) {
    Basis out;
    out.q = q;
    for (double r0 : b.roots) {
        hp t = r0;
        for (int it = 0; it < 40; ++it) {
            // (psi(t) - q)(rho + t), a polynomial.
            const hp p = (m.c * t + m.s2 * t * t - out.q) * (m.rho + t) - m.eta * t;
            const hp dp = (m.c + 2 * m.s2 * t) * (m.rho + t) + (m.c * t + m.s2 * t * t - out.q) - m.eta;
            t -= p / dp;
        }
        out.roots.push_back(t);
        out.weights.push_back(1 / m.psi_prime(t));
    }
    return out;
}

/// int_0^x e^{-theta y} W(y) dy
inline hp int_w(const Basis& b, const hp& x, const hp& theta) {
    hp sum = 0;
    for (std::size_t i = 0; i < b.roots.size(); ++i) {
        const hp d = b.roots[i] - theta;
        sum += b.weights[i] * (d == 0 ? x : (exp(d * x) - 1) / d);
    }
    return sum;
}

inline hp Z(const Model& m, const Basis& b, const hp& x, const hp& theta) {
    if (x <= 0) return exp(theta * x);
    return exp(theta * x) * (1 + (b.q - m.psi(theta)) * int_w(b, x, theta));
}

/// int_0^y e^{-theta u} W(y - u) du
inline hp conv(const Basis& b, const hp& y, const hp& theta) {
    if (y <= 0) return 0;
    hp sum = 0;
    for (std::size_t i = 0; i < b.roots.size(); ++i) {
        const hp d = b.roots[i] + theta;
        sum += b.weights[i] * (d == 0 ? y * exp(b.roots[i] * y) : (exp(b.roots[i] * y) - exp(-theta * y)) / d);
    }
    return sum;
}

struct Kit {
    Model m;
    hp r, lambda;  // r + lambda formed here so that q - psi(Phi(r)) is exactly lambda
    Basis at_r, at_rl;

    explicit Kit(const perex::PoissonKit& k)
        : m(k.sn), r(k.r), lambda(k.lambda), at_r(polish(m, k.at_r, r)), at_rl(polish(m, k.at_r_lambda, r + lambda)) {}

    hp phi_r() const { return at_r.roots[0]; }
    hp phi_rl() const { return at_rl.roots[0]; }
};

/// Down-crossing transform, generic theta (psi(theta) not r or r + lambda).
inline double down(const Kit& k, double x, double a, double theta) {
    const hp th = theta, y = hp(x) - a;
    const hp pr = k.phi_r(), pl = k.phi_rl(), p = k.m.psi(th);
    const hp bracket = Z(k.m, k.at_r, y, th) - Z(k.m, k.at_r, y, pl) * (p - k.r) / k.lambda * (pl - pr) / (th - pr);
    return static_cast<double>(k.lambda * exp(th * a) / (k.lambda + k.r - p) * bracket);
}

inline double up(const Kit& k, double x, double b, double theta) {
    const hp th = theta, y = hp(x) - b;
    const hp pr = k.phi_r(), pl = k.phi_rl();
    return static_cast<double>((pl - pr) / (pl + th) * Z(k.m, k.at_rl, y, pr) - k.lambda * conv(k.at_rl, y, th));
}

}  // namespace hp_oracle
