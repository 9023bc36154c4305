#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perex/errors.hpp"
#include "perex/levy_model.hpp"
#include "perex/roots.hpp"
#include "perex/scale_functions.hpp"

namespace perex {

enum class OptionKind { Put, Call };

enum class Case { PutSN, CallSN, PutSP, CallSP };

inline std::string_view to_string(OptionKind kind) { return kind == OptionKind::Put ? "put" : "call"; }

inline std::string_view to_string(Case c) {
    switch (c) {
        case Case::PutSN: return "PutSN";
        case Case::CallSN: return "CallSN";
        case Case::PutSP: return "PutSP";
        case Case::CallSP: return "CallSP";
    }
    return "?";
}

inline Case case_of(const LevyModel& model, OptionKind kind) {
    const bool sn = model.side == JumpSide::SpectrallyNegative;
    if (kind == OptionKind::Put) return sn ? Case::PutSN : Case::PutSP;
    return sn ? Case::CallSN : Case::CallSP;
}

inline double payoff(OptionKind kind, double strike, double spot) {
    return kind == OptionKind::Put ? std::fmax(strike - spot, 0.0) : std::fmax(spot - strike, 0.0);
}

/// Perpetual put or call exercisable at the arrival times of an independent
/// Poisson process with rate `lambda`.
struct OptionSpec {
    OptionKind kind = OptionKind::Put;
    double strike = 0.0;
    double rate = 0.0;
    double lambda = 0.0;

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike)) throw DomainError("OptionSpec: strike must be positive");
        if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("OptionSpec: rate must be positive");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("OptionSpec: lambda must be positive");
    }

    void validate(const LevyModel& model) const {
        validate();
        model.validate();
        if (kind == OptionKind::Call && !check_call_assumption(model, rate))
            throw AssumptionError("call requires E[S_1] < e^r (log E[S_1] < r)");
    }
};

/// Scale-function data shared by every periodic-exercise identity of a given
/// (model, r, lambda): bases for q = r and q = r + lambda of the SN view.
struct PoissonKit {
    LevyModel sn;
    double r = 0.0;
    double lambda = 0.0;
    ScaleBasis at_r;
    ScaleBasis at_r_lambda;

    double phi_r() const { return at_r.phi(); }
    double phi_rl() const { return at_r_lambda.phi(); }
    /// (psi(a) - psi(b)) / (a - b) of the SN exponent.
    double slope(double a, double b) const { return sn.slope(a, b); }
};

inline PoissonKit make_kit(const LevyModel& model, double r, double lambda) {
    if (!(r > 0.0) || !(lambda > 0.0)) throw DomainError("make_kit: r and lambda must be positive");
    PoissonKit kit;
    kit.sn = model.sn_view();
    kit.r = r;
    kit.lambda = lambda;
    kit.at_r = build_scale_basis(kit.sn, r);
    kit.at_r_lambda = build_scale_basis(kit.sn, r + lambda);
    return kit;
}

/// E_x[exp(-r tau + theta X_tau); tau < inf] where tau is the first Poisson
/// epoch with X <= a, for a spectrally negative X.
///
/// Evaluated in a factored form: the Phi(r) component cancels analytically
/// above the barrier, and the removable points psi(theta) = r and
/// psi(theta) = r + lambda are absorbed into divided differences of psi.
inline double down_crossing_transform(const PoissonKit& kit, double x, double a, double theta) {
    if (!kit.sn.mgf_finite(theta)) throw DomainError("down_crossing_transform: theta outside the domain of psi");
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    const double s_theta_l = kit.slope(theta, pl);
    if (s_theta_l == 0.0) throw DomainError("down_crossing_transform: psi(theta) = r + lambda at a negative root");
    const double y = x - a;
    const double scale = kit.lambda * std::exp(theta * a);

    if (y < 0.0) {
        const double curv = kit.sn.curvature(pr, theta, pl);
        return scale * (-exp_divided_difference(theta, pl, y) / s_theta_l +
                        std::exp(pl * y) * curv / (kit.slope(pr, pl) * s_theta_l));
    }

    const ScaleBasis& b = kit.at_r;
    double sum = 0.0;
    for (std::size_t i = 1; i < b.roots.size(); ++i) {
        const double z = b.roots[i];
        if (theta == z) throw DomainError("down_crossing_transform: theta is a negative root of psi = r");
        sum += b.weights[i] * std::exp(z * y) * (z - pr) / ((theta - z) * (pl - z));
    }
    return scale * kit.slope(theta, pr) / s_theta_l * sum;
}

/// E_x[exp(-r tau - theta (X_tau - b)); tau < inf] where tau is the first
/// Poisson epoch with X >= b, for a spectrally negative X. theta > -Phi(r).
inline double up_crossing_transform(const PoissonKit& kit, double x, double b, double theta) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    if (!(theta > -pr)) throw DomainError("up_crossing_transform: requires theta > -Phi(r)");
    const double y = x - b;
    if (y <= 0.0) return (pl - pr) / (pl + theta) * std::exp(pr * y);

    const ScaleBasis& basis = kit.at_r_lambda;
    // The e^{Phi(r+lambda) y} parts of Z^{(r+lambda)} and the convolution cancel.
    double sum = basis.weights[0] * std::exp(-theta * y) / (pl + theta);
    for (std::size_t i = 1; i < basis.roots.size(); ++i) {
        const double z = basis.roots[i];
        const double c = (pl - pr) / ((pl + theta) * (z - pr));
        sum += basis.weights[i] * (c * std::exp(z * y) - exp_divided_difference(z, -theta, y));
    }
    return kit.lambda * sum;
}

/// Coefficients of f(a; theta) = C0 - C1(theta) e^a.
inline double f_coefficient_c0(const PoissonKit& kit, double strike) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    // r / Phi(r) == slope(0, Phi(r)) since psi(0) = 0.
    return strike / (kit.lambda + kit.r) * pl * (pl - pr) * kit.slope(0.0, pr);
}

inline double f_coefficient_c1(const PoissonKit& kit, double theta) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    return kit.slope(theta, pr) * (pl - pr) / kit.slope(theta, pl);
}

inline double f_equation(const PoissonKit& kit, double strike, double a, double theta) {
    return f_coefficient_c0(kit, strike) - f_coefficient_c1(kit, theta) * std::exp(a);
}

/// Coefficients of g(b; theta) = G0 - G1(theta) e^b.
inline double g_coefficient_g0(const PoissonKit& kit, double strike) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    return strike * pr * (pl - pr) / pl;
}

inline double g_coefficient_g1(const PoissonKit& kit, double theta) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    if (theta == -pl) throw DomainError("g_equation: theta = -Phi(r + lambda) is a pole");
    return (pr + theta) * (pl - pr) / (pl + theta);
}

inline double g_equation(const PoissonKit& kit, double strike, double b, double theta) {
    return g_coefficient_g0(kit, strike) - g_coefficient_g1(kit, theta) * std::exp(b);
}

struct BarrierSolution {
    Case case_tag = Case::PutSN;
    double log_barrier = 0.0;
    double barrier = 0.0;
    double residual = 0.0;        // f or g at log_barrier
    double residual_scale = 1.0;  // C0 or G0
    int iterations = 0;           // 0: closed form

    double normalized_residual() const { return std::fabs(residual) / residual_scale; }
};

namespace detail {

/// Which root equation defines the barrier, and with which theta.
struct FirstOrderCondition {
    bool uses_f = true;
    double theta = 1.0;
};

inline FirstOrderCondition condition_for(Case c) {
    switch (c) {
        case Case::PutSN: return {true, 1.0};
        case Case::CallSN: return {false, -1.0};
        case Case::PutSP: return {false, 1.0};
        case Case::CallSP: return {true, -1.0};
    }
    return {};
}

inline double condition_value(const PoissonKit& kit, double strike, FirstOrderCondition foc, double z) {
    return foc.uses_f ? f_equation(kit, strike, z, foc.theta) : g_equation(kit, strike, z, foc.theta);
}

inline double condition_scale(const PoissonKit& kit, double strike, FirstOrderCondition foc) {
    return foc.uses_f ? f_coefficient_c0(kit, strike) : g_coefficient_g0(kit, strike);
}

/// Closed-form log root of the affine-in-e^z condition, written without the
/// (Phi(r+lambda) - Phi(r)) factor that both coefficients share.
inline double closed_form_root(const PoissonKit& kit, double strike, FirstOrderCondition foc) {
    const double pr = kit.phi_r();
    const double pl = kit.phi_rl();
    const double th = foc.theta;
    if (foc.uses_f) {
        const double num = strike * pl * kit.slope(0.0, pr) * kit.slope(th, pl);
        const double den = (kit.lambda + kit.r) * kit.slope(th, pr);
        if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den))
            throw DomainError("solve_barrier: non-finite or non-positive coefficients in f");
        return std::log(strike * pl / (kit.lambda + kit.r)) + std::log(kit.slope(0.0, pr)) +
               std::log(kit.slope(th, pl)) - std::log(kit.slope(th, pr));
    }
    const double num = pr * (pl + th);
    const double den = pl * (pr + th);
    if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den))
        throw DomainError("solve_barrier: non-finite or non-positive coefficients in g");
    return std::log(strike) + std::log(pr) - std::log(pl) + std::log(pl + th) - std::log(pr + th);
}

}  // namespace detail

/// Optimal periodic barrier and the value of the barrier strategy.
///
/// Immutable after construction; all members are pure and thread-safe.
class PeriodicPricer {
public:
    PeriodicPricer(const LevyModel& model, const OptionSpec& option)
        : model_(model), option_(option), case_(case_of(model, option.kind)) {
        option_.validate(model_);
        kit_ = make_kit(model_, option_.rate, option_.lambda);
    }

    const LevyModel& model() const { return model_; }
    const OptionSpec& option() const { return option_; }
    const PoissonKit& kit() const { return kit_; }
    Case case_tag() const { return case_; }
    double log_strike() const { return std::log(option_.strike); }

    BarrierSolution solve_barrier() const {
        const auto foc = detail::condition_for(case_);
        BarrierSolution sol;
        sol.case_tag = case_;
        sol.log_barrier = detail::closed_form_root(kit_, option_.strike, foc);
        sol.barrier = std::exp(sol.log_barrier);
        sol.residual = detail::condition_value(kit_, option_.strike, foc, sol.log_barrier);
        sol.residual_scale = detail::condition_scale(kit_, option_.strike, foc);
        return sol;
    }

    /// Same root located by bracketed iteration instead of the closed form.
    BarrierSolution solve_barrier_iteratively() const {
        const auto foc = detail::condition_for(case_);
        const double scale = detail::condition_scale(kit_, option_.strike, foc);
        auto fn = [&](double z) {
            const double v = detail::condition_value(kit_, option_.strike, foc, z);
            return std::pair{v, v - detail::condition_scale(kit_, option_.strike, foc)};
        };
        double lo = log_strike() - 1.0;
        double hi = log_strike() + 1.0;
        while (fn(lo).first <= 0.0) lo -= 2.0 * (hi - lo);
        while (fn(hi).first >= 0.0) hi += 2.0 * (hi - lo);
        const RootResult res = solve_bracketed(fn, lo, hi, 1e-13 * scale);
        BarrierSolution sol;
        sol.case_tag = case_;
        sol.log_barrier = res.root;
        sol.barrier = std::exp(res.root);
        sol.residual = detail::condition_value(kit_, option_.strike, foc, res.root);
        sol.residual_scale = scale;
        sol.iterations = res.iterations;
        return sol;
    }

    /// Put barriers may not exceed the strike, call barriers may not fall below it.
    void check_barrier_side(double z) const {
        if (option_.kind == OptionKind::Put && !(z <= log_strike()))
            throw DomainError("put barrier must not exceed the strike");
        if (option_.kind == OptionKind::Call && !(z >= log_strike()))
            throw DomainError("call barrier must not be below the strike");
    }

    /// Expected discounted payoff of the periodic barrier strategy with
    /// log-barrier `z`, started from log-price `x`. Valid for any z up to
    /// log K (puts) or from log K upwards (calls), optimal or not.
    double value(double z, double x) const {
        const double K = option_.strike;
        check_barrier_side(z);
        switch (case_) {
            case Case::PutSN:
                return K * down_crossing_transform(kit_, x, z, 0.0) - down_crossing_transform(kit_, x, z, 1.0);
            case Case::CallSN:
                return std::exp(z) * up_crossing_transform(kit_, x, z, -1.0) - K * up_crossing_transform(kit_, x, z, 0.0);
            case Case::PutSP:
                // Y = -X crosses -z from below.
                return K * up_crossing_transform(kit_, -x, -z, 0.0) - std::exp(z) * up_crossing_transform(kit_, -x, -z, 1.0);
            case Case::CallSP:
                return down_crossing_transform(kit_, -x, -z, -1.0) - K * down_crossing_transform(kit_, -x, -z, 0.0);
        }
        return 0.0;
    }

    /// Optimal value expressed through the simplified closed forms that hold
    /// once the first-order condition is imposed, written directly in terms
    /// of W, W_bar, Z and the convolution kernel. Returns the value and the
    /// magnitude of the largest term cancelled along the way.
    std::pair<double, double> simplified_optimal_value(double z, double x) const {
        const double K = option_.strike;
        const double lam = kit_.lambda;
        const double r = kit_.r;
        const double pr = kit_.phi_r();
        const double pl = kit_.phi_rl();
        const double ez = std::exp(z);
        const ScaleBasis& br = kit_.at_r;
        const ScaleBasis& bl = kit_.at_r_lambda;
        auto grow = [&](double y) {
            // Dominant cancelled term of the (r + lambda) convolutions.
            return lam * std::fabs(bl.weights[0]) * std::exp(pl * std::fmax(y, 0.0)) * std::fmax(K, ez);
        };
        switch (case_) {
            case Case::PutSN: {
                const double y = x - z;
                const double p1 = psi(model_, 1.0);
                const double t1 = lam * K / (lam + r) * Z(br, y, 0.0);
                const double t2 = lam * ez / (lam + r - p1) * Z(br, y, 1.0);
                // (psi(1) - r) / (1 - Phi(r)) as a divided difference.
                const double t3 = Z(br, y, pl) / pl * kit_.slope(1.0, pr) / (lam + r - p1) * (pl - pr) * ez;
                return {t1 - t2 + t3, std::fabs(t1) + std::fabs(t2) + std::fabs(t3)};
            }
            case Case::CallSN: {
                const double y = x - z;
                const double t1 = ez * (1.0 / pr) * (pl - pr) / (pl - 1.0) * Z(bl, y, pr);
                const double t2 = ez * lam * int_exp_W(bl, y, 1.0);
                const double t3 = K * lam * W_bar(bl, y);
                return {t1 - t2 + t3, std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + grow(y)};
            }
            case Case::PutSP: {
                const double y = z - x;
                const double t1 = ez * (1.0 / pr) * (pl - pr) / (pl + 1.0) * Z(bl, y, pr);
                const double t2 = ez * lam * int_exp_W(bl, y, -1.0);
                const double t3 = K * lam * W_bar(bl, y);
                return {t1 + t2 - t3, std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + grow(y)};
            }
            case Case::CallSP: {
                const double y = z - x;
                const double pm1 = psi(model_, -1.0);
                const double t1 = lam * K / (lam + r) * Z(br, y, 0.0);
                const double t2 = lam * ez / (lam + r - pm1) * Z(br, y, -1.0);
                const double t3 = Z(br, y, pl) / pl * kit_.slope(-1.0, pr) / (lam + r - pm1) * (pl - pr) * ez;
                return {-t1 + t2 + t3, std::fabs(t1) + std::fabs(t2) + std::fabs(t3)};
            }
        }
        return {0.0, 0.0};
    }

    /// Classical (continuously exercisable) optimal barrier, log scale.
    double classical_log_barrier() const {
        const double K = option_.strike;
        const double pr = kit_.phi_r();
        switch (case_) {
            case Case::PutSN:
                // K E[exp(inf X over e_r)], SN Wiener-Hopf factor at theta = 1.
                return std::log(K) + std::log(kit_.slope(0.0, pr)) - std::log(kit_.slope(1.0, pr));
            case Case::CallSN:
                // sup of X at e_r is Exp(Phi(r)).
                return std::log(K) + std::log(pr) - std::log(pr - 1.0);
            case Case::PutSP:
                return std::log(K) + std::log(pr) - std::log(pr + 1.0);
            case Case::CallSP:
                return std::log(K) + std::log(kit_.slope(0.0, pr)) - std::log(kit_.slope(-1.0, pr));
        }
        return 0.0;
    }

    /// Value of exercising the first time (continuous monitoring) the price
    /// crosses the log-barrier z.
    double classical_value(double z, double x) const {
        const double K = option_.strike;
        const double pr = kit_.phi_r();
        auto continuous_down = [&](double y, double theta, double level) {
            // E[exp(-r tau + theta X_tau)] for first passage below `level`, SN.
            const ScaleBasis& b = kit_.at_r;
            double sum = 0.0;
            for (std::size_t i = 1; i < b.roots.size(); ++i)
                sum += b.weights[i] * std::exp(b.roots[i] * y) * (b.roots[i] - pr) / (theta - b.roots[i]);
            return std::exp(theta * level) * kit_.slope(theta, pr) * sum;
        };
        switch (case_) {
            case Case::PutSN:
                if (x <= z) return K - std::exp(x);
                return K * continuous_down(x - z, 0.0, z) - continuous_down(x - z, 1.0, z);
            case Case::CallSN:
                if (x >= z) return std::exp(x) - K;
                return (std::exp(z) - K) * std::exp(-pr * (z - x));
            case Case::PutSP:
                if (x <= z) return K - std::exp(x);
                return (K - std::exp(z)) * std::exp(-pr * (x - z));
            case Case::CallSP:
                if (x >= z) return std::exp(x) - K;
                return continuous_down(z - x, -1.0, -z) - K * continuous_down(z - x, 0.0, -z);
        }
        return 0.0;
    }

private:
    LevyModel model_;
    OptionSpec option_;
    Case case_;
    PoissonKit kit_;
};

/// V(s), G(s) on a spot grid for one barrier strategy.
struct ValueCurve {
    Case case_tag = Case::PutSN;
    double log_barrier = 0.0;
    double lambda = 0.0;
    std::vector<double> spots;
    std::vector<double> values;
    std::vector<double> payoffs;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2) throw DomainError("linear_grid: need lo < hi and n >= 2");
    std::vector<double> g(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

/// 200 log-uniform points over [K/10, 10K].
inline std::vector<double> default_grid(double strike) { return log_grid(strike / 10.0, 10.0 * strike, 200); }

inline ValueCurve value_curve(const PeriodicPricer& pricer, double log_barrier, const std::vector<double>& spots) {
    ValueCurve curve;
    curve.case_tag = pricer.case_tag();
    curve.log_barrier = log_barrier;
    curve.lambda = pricer.option().lambda;
    curve.spots = spots;
    for (double s : spots) {
        if (!(s > 0.0)) throw DomainError("value_curve: spot prices must be positive");
        curve.values.push_back(pricer.value(log_barrier, std::log(s)));
        curve.payoffs.push_back(payoff(pricer.option().kind, pricer.option().strike, s));
    }
    return curve;
}

/// Optimal value curve. Each point is evaluated through the general barrier
/// formula and checked against the simplified optimal forms; disagreement
/// beyond 1e-9 relative (plus round-off of the cancelled terms) throws.
inline ValueCurve value_at_optimum(const PeriodicPricer& pricer, const std::vector<double>& spots) {
    const BarrierSolution sol = pricer.solve_barrier();
    ValueCurve curve = value_curve(pricer, sol.log_barrier, spots);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < spots.size(); ++i) {
        const auto [alt, magnitude] = pricer.simplified_optimal_value(sol.log_barrier, std::log(spots[i]));
        const double v = curve.values[i];
        const double tol = 1e-9 * std::fabs(v) + 64.0 * eps * magnitude;
        if (!(std::fabs(alt - v) <= tol)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "value_at_optimum: %s forms disagree at s = %.17g (%.17g vs %.17g)",
                          std::string(to_string(pricer.case_tag())).c_str(), spots[i], v, alt);
            throw ConsistencyError(buf);
        }
    }
    return curve;
}

inline ValueCurve value_at_optimum(const LevyModel& model, const OptionSpec& option) {
    PeriodicPricer pricer(model, option);
    return value_at_optimum(pricer, default_grid(option.strike));
}

/// Classical (lambda = infinity) value curve at the classical optimum.
inline ValueCurve classical_curve(const PeriodicPricer& pricer, const std::vector<double>& spots) {
    ValueCurve curve;
    curve.case_tag = pricer.case_tag();
    curve.log_barrier = pricer.classical_log_barrier();
    curve.lambda = std::numeric_limits<double>::infinity();
    curve.spots = spots;
    for (double s : spots) {
        curve.values.push_back(pricer.classical_value(curve.log_barrier, std::log(s)));
        curve.payoffs.push_back(payoff(pricer.option().kind, pricer.option().strike, s));
    }
    return curve;
}

// Free-function forms of the pricer operations.

inline BarrierSolution solve_barrier(const LevyModel& model, const OptionSpec& option) {
    return PeriodicPricer(model, option).solve_barrier();
}

inline double value(const LevyModel& model, const OptionSpec& option, double log_barrier, double x) {
    return PeriodicPricer(model, option).value(log_barrier, x);
}

inline double classical_barrier(const LevyModel& model, const OptionSpec& option) {
    return std::exp(PeriodicPricer(model, option).classical_log_barrier());
}

}  // namespace perex
