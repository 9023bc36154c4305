#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "perex/errors.hpp"
#include "perex/levy_model.hpp"
#include "perex/periodic_pricer.hpp"
#include "perex/philox.hpp"

namespace perex {

struct MCConfig {
    std::size_t n_paths = 200000;
    double horizon = 0.0;  // 0: default_horizon(r, lambda)
    std::uint64_t seed = 20180521;
    bool antithetic = false;  // negate the Brownian draws of paired paths
    bool share_measure = false;  // calls only: simulate under the Esscher(1) measure
    std::size_t batch_size = 4096;
    unsigned threads = 0;  // 0: PRICER_THREADS, else hardware concurrency

    void validate() const {
        if (n_paths < 100) throw DomainError("MCConfig: n_paths must be >= 100");
        if (antithetic && n_paths % 2 != 0) throw DomainError("MCConfig: antithetic runs need an even path count");
        if (horizon < 0.0 || !std::isfinite(horizon)) throw DomainError("MCConfig: horizon must be finite and >= 0");
        if (batch_size == 0) throw DomainError("MCConfig: batch_size must be positive");
    }
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    double truncation_bound = 0.0;  // analytic bound on the ignored tail beyond the horizon
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::string warning;
};

inline double default_horizon(double r, double lambda) { return std::max(50.0 / r, 20.0 / lambda); }

/// Thread count: explicit request, else hardware concurrency; PRICER_THREADS caps both.
inline unsigned resolve_threads(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PRICER_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

/// Sum in a fixed binary-tree order, so the result depends only on the data.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

namespace detail {

/// Runs `fn(i)` for i in [0, n) over `threads` workers in contiguous batches.
/// Each index writes only its own output, so results do not depend on the split.
template <class Fn>
void parallel_paths(std::size_t n, std::size_t batch, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= batch) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t n_batches = (n + batch - 1) / batch;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t b = t; b < n_batches; b += threads) {
                const std::size_t end = std::min(n, (b + 1) * batch);
                for (std::size_t i = b * batch; i < end; ++i) fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

/// Event-driven exact path of X observed at the exercise epochs.
///
/// The exercise process (rate lambda) and the jump process (rate eta) are
/// superposed; each event is an exercise epoch with probability
/// lambda / (lambda + eta). Drift and Brownian parts are Gaussian given the
/// elapsed time, so they are drawn in one piece at each exercise epoch.
/// `on_epoch(t, x)` returns true to stop the path.
template <class OnEpoch>
void run_path(const LevyModel& model, double lambda, double x0, double horizon, PhiloxStream& rng, double normal_sign,
              OnEpoch&& on_epoch) {
    const double total_rate = lambda + model.jump_rate;
    const double p_exercise = lambda / total_rate;
    const double jump_dir = -model.jump_sign();
    double t = 0.0;
    double x = x0;
    double pending = 0.0;  // time since the last exercise epoch
    for (;;) {
        const double dt = rng.exponential(total_rate);
        t += dt;
        if (t > horizon) return;
        pending += dt;
        if (model.jump_rate > 0.0 && rng.uniform() >= p_exercise) {
            x += jump_dir * rng.exponential(model.jump_param);
            continue;
        }
        x += model.drift * pending;
        if (model.sigma > 0.0) x += normal_sign * model.sigma * std::sqrt(pending) * rng.normal();
        pending = 0.0;
        if (on_epoch(t, x)) return;
    }
}

inline std::uint64_t stream_for(const MCConfig& cfg, std::size_t path) {
    return cfg.antithetic ? static_cast<std::uint64_t>(path / 2) : static_cast<std::uint64_t>(path);
}

inline double sign_for(const MCConfig& cfg, std::size_t path) { return cfg.antithetic && (path % 2 == 1) ? -1.0 : 1.0; }

/// Mean and standard error of per-path samples (antithetic pairs averaged first).
inline MCEstimate summarize(std::vector<double> samples, const MCConfig& cfg) {
    if (cfg.antithetic) {
        for (std::size_t i = 0; i < samples.size() / 2; ++i)
            samples[i] = 0.5 * (samples[2 * i] + samples[2 * i + 1]);
        samples.resize(samples.size() / 2);
    }
    const std::size_t n = samples.size();
    MCEstimate est;
    est.mean = pairwise_sum(samples.data(), n) / static_cast<double>(n);
    for (double& v : samples) v = (v - est.mean) * (v - est.mean);
    const double var = pairwise_sum(samples.data(), n) / static_cast<double>(n - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(n));
    est.n_paths = cfg.n_paths;
    est.seed = cfg.seed;
    return est;
}

/// sum_{n > N} q^n, with N the expected number of exercise epochs before the horizon.
inline double geometric_tail(double lambda, double r, double alpha, double horizon) {
    if (!(alpha < r)) return std::numeric_limits<double>::infinity();
    const double q = lambda / (lambda + r - alpha);
    const double n = std::floor(lambda * horizon);
    return std::pow(q, n + 1.0) / (1.0 - q);
}

/// Simulation law and discounted payoff of exercising at epoch (t, x).
///
/// Under the share measure, e^{-r t}(e^x - K) = e^{x0 - (r - psi(1)) t}(1 - K e^{-x})
/// times the density, so the sample is bounded by e^{x0} even when e^{X} has
/// no second moment.
struct StrategyPayoff {
    LevyModel law;
    OptionKind kind;
    double strike, rate, x0;
    bool share;
    double share_rate = 0.0;  // r - psi(1)

    StrategyPayoff(const LevyModel& model, const OptionSpec& option, double x0_, bool share_)
        : law(model), kind(option.kind), strike(option.strike), rate(option.rate), x0(x0_), share(share_) {
        if (!share) return;
        if (kind != OptionKind::Call) throw DomainError("share_measure applies to calls only");
        share_rate = rate - model.log_mgf(1.0);
        if (!(share_rate > 0.0)) throw AssumptionError("share_measure: requires log E[S_1] < r");
        law = model.esscher(1.0);
    }

    double operator()(double t, double x) const {
        if (share) return std::exp(x0 - share_rate * t) * (1.0 - strike * std::exp(-x));
        return std::exp(-rate * t) * payoff(kind, strike, std::exp(x));
    }

    /// Bound on the value carried by paths still alive at the horizon.
    double tail(const LevyModel& model, double lambda, double horizon) const {
        if (kind == OptionKind::Put) return strike * std::exp(-rate * horizon);
        if (share) return std::exp(x0 - share_rate * horizon);
        return std::exp(x0) * geometric_tail(lambda, rate, model.log_mgf(1.0), horizon);
    }
};

inline void attach_warning(MCEstimate& est) {
    if (est.truncation_bound > 0.1 * est.stderr_) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "truncation bound %.3g exceeds 0.1 * stderr (%.3g); increase the horizon",
                      est.truncation_bound, est.stderr_);
        est.warning = buf;
    }
}

}  // namespace detail

/// Shortest horizon whose truncation bound for the strategy value, started
/// from log-price x0, does not exceed `target`.
inline double horizon_for_tail(const LevyModel& model, const OptionSpec& option, double x0, double target,
                               bool share_measure = false) {
    if (!(target > 0.0)) throw DomainError("horizon_for_tail: target must be positive");
    const double r = option.rate;
    if (option.kind == OptionKind::Put) return std::max(0.0, std::log(option.strike / target) / r);
    const double alpha = model.log_mgf(1.0);
    if (!(alpha < r)) throw AssumptionError("horizon_for_tail: call tail diverges");
    if (share_measure) return std::max(0.0, (x0 - std::log(target)) / (r - alpha));
    const double q = option.lambda / (option.lambda + r - alpha);
    // e^{x0} q^{N+1} / (1 - q) <= target
    const double n = std::ceil((std::log(target * (1.0 - q)) - x0) / std::log(q)) - 1.0;
    return std::max(n, 0.0) / option.lambda + 1.0 / option.lambda;
}

/// Discounted payoff of the periodic barrier strategy with log-barrier `z`,
/// simulated from log-price x0. The model is used in its own coordinates.
inline MCEstimate simulate_strategy_value(const LevyModel& model, const OptionSpec& option, double z, double x0,
                                          const MCConfig& cfg) {
    option.validate(model);
    cfg.validate();
    const double K = option.strike;
    const bool put = option.kind == OptionKind::Put;
    if (put ? !(z <= std::log(K)) : !(z >= std::log(K)))
        throw DomainError("simulate_strategy_value: barrier on the wrong side of the strike");
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(option.rate, option.lambda);
    const detail::StrategyPayoff pay(model, option, x0, cfg.share_measure);

    std::vector<double> samples(cfg.n_paths, 0.0);
    detail::parallel_paths(cfg.n_paths, cfg.batch_size, resolve_threads(cfg.threads), [&](std::size_t i) {
        PhiloxStream rng(cfg.seed, detail::stream_for(cfg, i));
        double result = 0.0;
        detail::run_path(pay.law, option.lambda, x0, horizon, rng, detail::sign_for(cfg, i), [&](double t, double x) {
            const bool stop = put ? x <= z : x >= z;
            if (stop) result = pay(t, x);
            return stop;
        });
        samples[i] = result;
    });

    MCEstimate est = detail::summarize(std::move(samples), cfg);
    est.horizon = horizon;
    est.truncation_bound = pay.tail(model, option.lambda, horizon);
    detail::attach_warning(est);
    return est;
}

enum class Crossing { Down, Up };

/// Down: E_x[exp(-r tau + theta X_tau)], tau the first epoch with X <= level.
/// Up:   E_x[exp(-r tau - theta (X_tau - level))], tau the first epoch with X >= level.
inline MCEstimate simulate_crossing_transform(const LevyModel& model, double r, double lambda, double x0, double level,
                                              double theta, Crossing direction, const MCConfig& cfg) {
    model.validate();
    cfg.validate();
    if (!(r > 0.0) || !(lambda > 0.0)) throw DomainError("simulate_crossing_transform: r and lambda must be positive");
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(r, lambda);
    const bool down = direction == Crossing::Down;

    std::vector<double> samples(cfg.n_paths, 0.0);
    detail::parallel_paths(cfg.n_paths, cfg.batch_size, resolve_threads(cfg.threads), [&](std::size_t i) {
        PhiloxStream rng(cfg.seed, detail::stream_for(cfg, i));
        double result = 0.0;
        detail::run_path(model, lambda, x0, horizon, rng, detail::sign_for(cfg, i), [&](double t, double x) {
            const bool stop = down ? x <= level : x >= level;
            if (stop) result = down ? std::exp(-r * t + theta * x) : std::exp(-r * t - theta * (x - level));
            return stop;
        });
        samples[i] = result;
    });

    MCEstimate est = detail::summarize(std::move(samples), cfg);
    est.horizon = horizon;
    // The integrand is bounded by exp(theta level) (down, theta >= 0) or 1 (up, theta >= 0).
    if (down && theta >= 0.0)
        est.truncation_bound = std::exp(theta * level - r * horizon);
    else if (!down && theta >= 0.0)
        est.truncation_bound = std::exp(-r * horizon);
    else {
        const double e = down ? theta : -theta;
        const double shift = down ? theta * x0 : -theta * (x0 - level);
        est.truncation_bound = model.mgf_finite(e)
                                   ? std::exp(shift) * detail::geometric_tail(lambda, r, model.log_mgf(e), horizon)
                                   : std::numeric_limits<double>::infinity();
    }
    detail::attach_warning(est);
    return est;
}

struct BarrierSearchResult {
    std::size_t best_index = 0;
    double best_log_barrier = 0.0;
    std::vector<MCEstimate> estimates;  // one per candidate, same paths
};

/// Evaluates every candidate log-barrier on the same simulated paths
/// (common random numbers) and returns the argmax of the estimated value.
inline BarrierSearchResult empirical_barrier_search(const LevyModel& model, const OptionSpec& option, double x0,
                                                    const std::vector<double>& candidates, const MCConfig& cfg) {
    option.validate(model);
    cfg.validate();
    if (candidates.empty()) throw DomainError("empirical_barrier_search: empty barrier grid");
    const double K = option.strike;
    const bool put = option.kind == OptionKind::Put;
    for (double z : candidates)
        if (put ? !(z <= std::log(K)) : !(z >= std::log(K)))
            throw DomainError("empirical_barrier_search: candidate on the wrong side of the strike");
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(option.rate, option.lambda);
    const detail::StrategyPayoff pay(model, option, x0, cfg.share_measure);
    const std::size_t m = candidates.size();

    std::vector<double> samples(cfg.n_paths * m, 0.0);
    detail::parallel_paths(cfg.n_paths, cfg.batch_size, resolve_threads(cfg.threads), [&](std::size_t i) {
        PhiloxStream rng(cfg.seed, detail::stream_for(cfg, i));
        double* row = samples.data() + i * m;
        std::vector<char> stopped(m, 0);
        std::size_t remaining = m;
        detail::run_path(pay.law, option.lambda, x0, horizon, rng, detail::sign_for(cfg, i), [&](double t, double x) {
            for (std::size_t j = 0; j < m; ++j) {
                if (stopped[j]) continue;
                if (put ? x <= candidates[j] : x >= candidates[j]) {
                    row[j] = pay(t, x);
                    stopped[j] = 1;
                    --remaining;
                }
            }
            return remaining == 0;
        });
    });

    BarrierSearchResult res;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> column(cfg.n_paths);
        for (std::size_t i = 0; i < cfg.n_paths; ++i) column[i] = samples[i * m + j];
        MCEstimate est = detail::summarize(std::move(column), cfg);
        est.horizon = horizon;
        est.truncation_bound = pay.tail(model, option.lambda, horizon);
        detail::attach_warning(est);
        res.estimates.push_back(est);
        if (est.mean > res.estimates[res.best_index].mean) res.best_index = j;
    }
    res.best_log_barrier = candidates[res.best_index];
    return res;
}

}  // namespace perex
