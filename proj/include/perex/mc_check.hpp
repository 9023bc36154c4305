#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "perex/mc_oracle.hpp"
#include "perex/periodic_pricer.hpp"

namespace perex {

struct McCheckRow {
    double spot = 0.0;
    double analytic = 0.0;
    MCEstimate mc;
    double z_score = 0.0;
};

struct McCheckReport {
    Case case_tag = Case::PutSN;
    double log_barrier = 0.0;
    std::vector<McCheckRow> rows;
    double z_limit = 3.0;

    bool z_ok() const {
        for (const auto& row : rows)
            if (!(std::fabs(row.z_score) <= z_limit)) return false;
        return true;
    }

    bool tails_ok() const {
        for (const auto& row : rows)
            if (!(row.mc.truncation_bound < 0.1 * row.mc.stderr_)) return false;
        return true;
    }

    bool passed() const { return z_ok() && tails_ok(); }
};

/// Five spot prices log-spaced over [K/2, 2K].
inline std::vector<double> default_check_spots(double strike) { return log_grid(strike / 2.0, 2.0 * strike, 5); }

/// Analytic optimal value against the simulated value of the same strategy.
inline McCheckReport run_mc_check(const PeriodicPricer& pricer, const std::vector<double>& spots, const MCConfig& cfg) {
    McCheckReport report;
    report.case_tag = pricer.case_tag();
    report.log_barrier = pricer.solve_barrier().log_barrier;
    for (double s : spots) {
        McCheckRow row;
        row.spot = s;
        row.analytic = pricer.value(report.log_barrier, std::log(s));
        row.mc = simulate_strategy_value(pricer.model(), pricer.option(), report.log_barrier, std::log(s), cfg);
        row.z_score = row.mc.stderr_ > 0.0 ? (row.mc.mean - row.analytic) / row.mc.stderr_
                                           : (row.mc.mean == row.analytic ? 0.0 : INFINITY);
        report.rows.push_back(row);
    }
    return report;
}

inline std::string format_report(const McCheckReport& report) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "case %s  barrier %.12g\n", std::string(to_string(report.case_tag)).c_str(),
                  std::exp(report.log_barrier));
    out += buf;
    out += "s,analytic,mc_mean,stderr,z,tail_bound\n";
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.12g,%.12g,%.6g,%.4f,%.3g\n", row.spot, row.analytic, row.mc.mean,
                      row.mc.stderr_, row.z_score, row.mc.truncation_bound);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "status %s\n", report.passed() ? "PASS" : "FAIL");
    out += buf;
    return out;
}

}  // namespace perex
