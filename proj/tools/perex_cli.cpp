// perex_cli: optimal barriers, value curves and Monte Carlo checks for
// perpetual options exercisable at Poisson epochs.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 model assumption
// violated, 3 Monte Carlo validation failed.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "perex/perex.hpp"

namespace {

using namespace perex;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string model_path;
    std::string side = "sn";
    std::string kind = "put";
    double sigma = 0.2;
    double jump_rate = 1.0;
    double jump_param = 2.0;
    std::optional<double> drift;  // unset: calibrate from rate and delta
    double strike = 50.0;
    double rate = 0.05;
    double delta = 0.03;
    double lambda = 1.0;
    std::string grid;
    std::string out;
    std::size_t paths = 200000;
    std::uint64_t seed = 20180521;
    double horizon = 0.0;
    bool share_measure = false;
    unsigned threads = 0;
    std::string figure;
    std::vector<double> lambdas;
    std::optional<double> barrier;
    std::vector<double> spots;
};

LevyModel build_model(const Options& o) {
    if (!o.model_path.empty()) {
        try {
            return load_model(o.model_path);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        } catch (const std::runtime_error& e) {
            throw ConfigError(e.what());
        }
    }
    LevyModel m;
    try {
        m.side = parse_side(o.side);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    m.sigma = o.sigma;
    m.jump_rate = o.jump_rate;
    m.jump_param = o.jump_param;
    m.drift = o.drift ? *o.drift : calibrate_drift(o.sigma, o.jump_rate, o.jump_param, m.side, o.rate, o.delta);
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return m;
}

OptionKind parse_kind(const std::string& s) {
    if (s == "put") return OptionKind::Put;
    if (s == "call") return OptionKind::Call;
    throw ConfigError("unknown option kind '" + s + "' (expected put or call)");
}

OptionSpec build_option(const Options& o, OptionKind kind, double lambda) {
    OptionSpec spec{kind, o.strike, o.rate, lambda};
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

/// "min:max:n" or "min:max:n:log" (also ":lin").
std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4) throw ConfigError("--grid expects min:max:n[:log]");
    double lo = 0.0, hi = 0.0;
    long n = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        n = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--grid: cannot parse '" + text + "'");
    }
    const bool log_scale = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin") throw ConfigError("--grid: spacing must be log or lin");
    if (!(lo < hi) || n < 2) throw ConfigError("--grid: need min < max and n >= 2");
    if (!(lo > 0.0)) throw ConfigError("--grid: spot prices must be positive");
    return log_scale ? log_grid(lo, hi, static_cast<std::size_t>(n)) : linear_grid(lo, hi, static_cast<std::size_t>(n));
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_csv(const Options& o, const std::vector<ValueCurve>& curves) {
    Output out(o.out);
    out.stream() << kCurveCsvHeader << '\n';
    for (const auto& c : curves) write_curve_rows(out.stream(), c);
}

int cmd_calibrate(const Options& o, bool kind_given) {
    const LevyModel m = build_model(o);
    const bool call_ok = check_call_assumption(m, o.rate);
    nlohmann::json report = to_json(m);
    report["rate"] = o.rate;
    report["log_E_S1"] = m.mgf_finite(1.0) ? nlohmann::json(m.log_mgf(1.0)) : nlohmann::json("inf");
    report["call_assumption"] = call_ok;
    report["phi_r"] = phi(m, o.rate);
    report["phi_r_lambda"] = phi(m, o.rate + o.lambda);
    report["lambda"] = o.lambda;
    std::cout << report.dump(2) << '\n';
    if (kind_given && parse_kind(o.kind) == OptionKind::Call && !call_ok) {
        std::cerr << "error: call pricing requires log E[S_1] < r\n";
        return 2;
    }
    return 0;
}

int cmd_barrier(const Options& o) {
    const LevyModel m = build_model(o);
    const PeriodicPricer pricer(m, build_option(o, parse_kind(o.kind), o.lambda));
    nlohmann::json report = to_json(pricer.solve_barrier());
    report["strike"] = o.strike;
    report["lambda"] = o.lambda;
    report["classical_barrier"] = std::exp(pricer.classical_log_barrier());
    std::cout << report.dump(2) << '\n';
    return 0;
}

std::vector<double> spots_or(const Options& o, std::vector<double> fallback) {
    return o.grid.empty() ? fallback : parse_grid(o.grid);
}

int cmd_value_curve(const Options& o) {
    const LevyModel m = build_model(o);
    const PeriodicPricer pricer(m, build_option(o, parse_kind(o.kind), o.lambda));
    const auto spots = spots_or(o, default_grid(o.strike));
    if (o.barrier) {
        if (!(*o.barrier > 0.0)) throw ConfigError("--barrier must be positive");
        write_csv(o, {value_curve(pricer, std::log(*o.barrier), spots)});
    } else {
        write_csv(o, {value_at_optimum(pricer, spots)});
    }
    return 0;
}

std::vector<ValueCurve> sweep_curves(const Options& o, const LevyModel& m, OptionKind kind,
                                     const std::vector<double>& lambdas, const std::vector<double>& spots) {
    std::vector<ValueCurve> curves;
    for (double lam : lambdas) curves.push_back(value_at_optimum(PeriodicPricer(m, build_option(o, kind, lam)), spots));
    curves.push_back(classical_curve(PeriodicPricer(m, build_option(o, kind, o.lambda)), spots));
    return curves;
}

int cmd_figure(const Options& o) {
    const LevyModel m = build_model(o);
    const auto spots = spots_or(o, figure_spot_grid(o.strike));
    const std::string& f = o.figure;
    if (f == "put-curves" || f == "call-curves") {
        const OptionKind kind = f == "put-curves" ? OptionKind::Put : OptionKind::Call;
        const PeriodicPricer pricer(m, build_option(o, kind, o.lambda));
        std::vector<ValueCurve> curves{value_at_optimum(pricer, spots)};
        for (double b : comparison_barriers(kind, pricer.solve_barrier().barrier, o.strike))
            curves.push_back(value_curve(pricer, std::log(b), spots));
        write_csv(o, curves);
        return 0;
    }
    if (f == "put-lambda-sweep") {
        write_csv(o, sweep_curves(o, m, OptionKind::Put, put_lambda_sweep(), spots));
        return 0;
    }
    if (f == "call-lambda-sweep") {
        write_csv(o, sweep_curves(o, m, OptionKind::Call, call_lambda_sweep(), spots));
        return 0;
    }
    throw ConfigError("unknown figure '" + f + "'");
}

int cmd_lambda_sweep(const Options& o) {
    const LevyModel m = build_model(o);
    const OptionKind kind = parse_kind(o.kind);
    std::vector<double> lambdas = o.lambdas;
    if (lambdas.empty()) lambdas = kind == OptionKind::Put ? put_lambda_sweep() : call_lambda_sweep();
    write_csv(o, sweep_curves(o, m, kind, lambdas, spots_or(o, default_grid(o.strike))));
    return 0;
}

int cmd_mc_check(const Options& o) {
    const LevyModel m = build_model(o);
    const PeriodicPricer pricer(m, build_option(o, parse_kind(o.kind), o.lambda));
    MCConfig cfg;
    cfg.n_paths = o.paths;
    cfg.seed = o.seed;
    cfg.horizon = o.horizon;
    cfg.share_measure = o.share_measure;
    cfg.threads = o.threads;
    if (cfg.share_measure && pricer.option().kind != OptionKind::Call)
        throw ConfigError("--share-measure applies to calls only");
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto spots = o.spots.empty() ? default_check_spots(o.strike) : o.spots;
    const McCheckReport report = run_mc_check(pricer, spots, cfg);
    Output out(o.out);
    out.stream() << format_report(report);
    return report.passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perpetual options exercisable at Poisson epochs under one-sided exponential Levy models"};
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", o.model_path, "JSON model file")->check(CLI::ExistingFile);
        sub->add_option("--side", o.side, "jump side: sn or sp");
        sub->add_option("--sigma", o.sigma, "Brownian volatility");
        sub->add_option("--jump-rate", o.jump_rate, "jump intensity");
        sub->add_option("--jump-param", o.jump_param, "exponential jump size parameter");
        sub->add_option("--drift", o.drift, "drift of X (default: calibrated from --rate and --delta)");
        sub->add_option("--rate", o.rate, "interest rate r");
        sub->add_option("--delta", o.delta, "dividend yield used for drift calibration");
        sub->add_option("--lambda", o.lambda, "exercise opportunity rate");
    };
    auto add_option_flags = [&](CLI::App* sub) {
        sub->add_option("--kind", o.kind, "put or call");
        sub->add_option("--strike", o.strike, "strike K");
    };
    auto add_curve = [&](CLI::App* sub) {
        sub->add_option("--grid", o.grid, "spot grid min:max:n[:log]");
        sub->add_option("--out", o.out, "output path (default stdout)");
    };

    auto* calibrate = app.add_subcommand("calibrate", "calibrate the drift and report assumption status");
    add_model(calibrate);
    add_option_flags(calibrate);

    auto* barrier = app.add_subcommand("barrier", "optimal periodic and classical barriers");
    add_model(barrier);
    add_option_flags(barrier);

    auto* curve = app.add_subcommand("value-curve", "value curve of the optimal (or a given) barrier as CSV");
    add_model(curve);
    add_option_flags(curve);
    add_curve(curve);
    curve->add_option("--barrier", o.barrier, "evaluate this barrier price instead of the optimum");

    auto* figure = app.add_subcommand("figure", "curves behind the standard figures as CSV");
    add_model(figure);
    figure->add_option("--strike", o.strike, "strike K");
    add_curve(figure);
    figure->add_option("--figure", o.figure, "put-curves, call-curves, put-lambda-sweep or call-lambda-sweep")
        ->required()
        ->check(CLI::IsMember({"put-curves", "call-curves", "put-lambda-sweep", "call-lambda-sweep"}));

    auto* sweep = app.add_subcommand("lambda-sweep", "optimal curves over a lambda grid plus the classical curve");
    add_model(sweep);
    add_option_flags(sweep);
    add_curve(sweep);
    sweep->add_option("--lambdas", o.lambdas, "lambda values (default: the standard sweep for --kind)")->delimiter(',');

    auto* mc = app.add_subcommand("mc-check", "compare analytic values with Monte Carlo");
    add_model(mc);
    add_option_flags(mc);
    mc->add_option("--out", o.out, "report path (default stdout)");
    mc->add_option("--paths", o.paths, "number of paths");
    mc->add_option("--seed", o.seed, "random seed");
    mc->add_option("--horizon", o.horizon, "simulation horizon (default max(50/r, 20/lambda))");
    mc->add_option("--threads", o.threads, "worker threads (default: hardware concurrency; PRICER_THREADS caps)");
    mc->add_flag("--share-measure", o.share_measure, "calls: simulate under the share measure (bounded samples)");
    mc->add_option("--spots", o.spots, "spot prices (default: 5 log-spaced over [K/2, 2K])")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*calibrate) return cmd_calibrate(o, calibrate->count("--kind") > 0);
        if (*barrier) return cmd_barrier(o);
        if (*curve) return cmd_value_curve(o);
        if (*figure) return cmd_figure(o);
        if (*sweep) return cmd_lambda_sweep(o);
        if (*mc) return cmd_mc_check(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const AssumptionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
