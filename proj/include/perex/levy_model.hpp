#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "perex/errors.hpp"
#include "perex/roots.hpp"

namespace perex {

enum class JumpSide { SpectrallyNegative, SpectrallyPositive };

inline std::string_view to_string(JumpSide side) {
    return side == JumpSide::SpectrallyNegative ? "SN" : "SP";
}

/// Brownian motion with drift plus compound-Poisson jumps of Exp(jump_param)
/// size, all jumps in one direction. X is the log-price, S = exp(X).
///
/// Parameters are stored in the process's own coordinates. Every fluctuation
/// identity in this library is written for the spectrally negative case, so
/// SP models are handled through `sn_view()`, i.e. the dual Y = -X.
struct LevyModel {
    JumpSide side = JumpSide::SpectrallyNegative;
    double sigma = 0.0;
    double drift = 0.0;
    double jump_rate = 0.0;
    double jump_param = 1.0;

    /// +1 when jumps are downward, -1 when upward. The jump part of the
    /// exponent is jump_rate * (rho / (rho + sign * theta) - 1).
    double jump_sign() const { return side == JumpSide::SpectrallyNegative ? 1.0 : -1.0; }

    void validate() const {
        auto fail = [](const char* what) { throw DomainError(std::string("LevyModel: ") + what); };
        if (!std::isfinite(sigma) || !std::isfinite(drift) || !std::isfinite(jump_rate) || !std::isfinite(jump_param))
            fail("parameters must be finite");
        if (sigma < 0.0) fail("sigma must be >= 0");
        if (jump_rate < 0.0) fail("jump_rate must be >= 0");
        if (jump_param <= 0.0) fail("jump_param must be > 0");
        if (sigma == 0.0 && jump_rate == 0.0) fail("sigma = 0 and jump_rate = 0 gives a deterministic path");
        if (sigma == 0.0) {
            // Without a Brownian part the drift must push against the jumps.
            const bool opposes = side == JumpSide::SpectrallyNegative ? drift > 0.0 : drift < 0.0;
            if (!opposes) fail("with sigma = 0 the drift must oppose the jump direction (monotone paths)");
        }
    }

    /// Y = -X: drift flips sign and the jump side swaps.
    LevyModel dual() const {
        LevyModel y = *this;
        y.drift = -drift;
        y.side = side == JumpSide::SpectrallyNegative ? JumpSide::SpectrallyPositive : JumpSide::SpectrallyNegative;
        return y;
    }

    LevyModel sn_view() const { return side == JumpSide::SpectrallyNegative ? *this : dual(); }

    /// Law of X under dP^h/dP = exp(h X_t - psi(h) t); its exponent is
    /// psi(theta + h) - psi(h), again with exponential jumps.
    LevyModel esscher(double h) const {
        if (!mgf_finite(h)) throw DomainError("LevyModel::esscher: tilt outside the exponential-moment strip");
        LevyModel tilted = *this;
        tilted.drift = drift + sigma * sigma * h;
        const double s = jump_sign();
        tilted.jump_rate = jump_rate * jump_param / (jump_param + s * h);
        tilted.jump_param = jump_param + s * h;
        return tilted;
    }

    /// log E[exp(theta X_1)] is finite iff rho + sign * theta > 0.
    bool mgf_finite(double theta) const {
        return jump_rate == 0.0 || jump_param + jump_sign() * theta > 0.0;
    }

    /// log E[exp(theta X_1)] in the model's own coordinates.
    double log_mgf(double theta) const {
        if (!mgf_finite(theta)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "Laplace exponent undefined at theta = %.17g (pole at %.17g)", theta,
                          -jump_sign() * jump_param);
            throw DomainError(buf);
        }
        double value = drift * theta + 0.5 * sigma * sigma * theta * theta;
        if (jump_rate > 0.0) {
            const double den = jump_param + jump_sign() * theta;
            // rho/(rho + s t) - 1 = -s t / (rho + s t)
            value += jump_rate * (-jump_sign() * theta) / den;
        }
        return value;
    }

    double log_mgf_prime(double theta) const {
        double value = drift + sigma * sigma * theta;
        if (jump_rate > 0.0) {
            const double den = jump_param + jump_sign() * theta;
            value -= jump_rate * jump_param * jump_sign() / (den * den);
        }
        return value;
    }

    /// First divided difference (psi(a) - psi(b)) / (a - b); equals psi'(a)
    /// when a == b. Evaluated without cancellation.
    double slope(double a, double b) const {
        double value = drift + 0.5 * sigma * sigma * (a + b);
        if (jump_rate > 0.0) {
            const double s = jump_sign();
            value -= s * jump_rate * jump_param / ((jump_param + s * a) * (jump_param + s * b));
        }
        return value;
    }

    /// Second divided difference psi[a, b, c].
    double curvature(double a, double b, double c) const {
        double value = 0.5 * sigma * sigma;
        if (jump_rate > 0.0) {
            const double s = jump_sign();
            value += jump_rate * jump_param / ((jump_param + s * a) * (jump_param + s * b) * (jump_param + s * c));
        }
        return value;
    }
};

/// Laplace exponent of the spectrally negative representation: psi of X for
/// SN models, psi of Y = -X for SP models. psi(model, 0) == 0 exactly.
inline double psi(const LevyModel& model, double theta) {
    return model.sn_view().log_mgf(theta);
}

/// Right inverse Phi(p) = sup{s >= 0 : psi(s) = p} of the SN exponent.
inline double phi(const LevyModel& model, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("phi: p must be positive and finite");
    const LevyModel sn = model.sn_view();
    double hi = 1.0;
    while (sn.log_mgf(hi) <= p) {
        hi *= 2.0;
        if (hi > 1e300) throw ConvergenceError("phi: could not bracket root");
    }
    auto fn = [&](double t) { return std::pair{sn.log_mgf(t) - p, sn.log_mgf_prime(t)}; };
    const RootResult res = solve_bracketed(fn, 0.0, hi, 1e-12 * std::fmax(1.0, p) * 0.5);
    return res.root;
}

/// Drift c such that log E[S_1] = r - delta.
inline double calibrate_drift(double sigma, double jump_rate, double jump_param, JumpSide side, double r, double delta) {
    if (!std::isfinite(r) || !std::isfinite(delta)) throw DomainError("calibrate_drift: r and delta must be finite");
    if (!(jump_param > 0.0)) throw DomainError("calibrate_drift: jump_param must be > 0");
    double jump_term = 0.0;
    if (jump_rate > 0.0) {
        if (side == JumpSide::SpectrallyPositive) {
            if (jump_param <= 1.0) throw DomainError("calibrate_drift: E[S_1] is infinite for SP jumps with rho <= 1");
            jump_term = jump_rate * (jump_param / (jump_param - 1.0) - 1.0);
        } else {
            jump_term = jump_rate * (jump_param / (jump_param + 1.0) - 1.0);
        }
    }
    return (r - delta) - 0.5 * sigma * sigma - jump_term;
}

/// E[S_1] < e^r, i.e. log_mgf(1) < r in the model's own coordinates.
inline bool check_call_assumption(const LevyModel& model, double r) {
    if (!model.mgf_finite(1.0)) return false;
    return model.log_mgf(1.0) < r;
}

}  // namespace perex
