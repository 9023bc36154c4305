#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "perex/io.hpp"
#include "test_models.hpp"

using namespace perex;

TEST(Io, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 50.0, 1e-300, 6.02214076e23, -2.5, 16.389280746792988}) {
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(format_double(50.0), "50");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Io, ModelFromJsonCalibrates) {
    const auto doc = nlohmann::json::parse(
        R"({"side": "SN", "sigma": 0.2, "drift": "calibrate", "jump_rate": 1, "jump_param": 2, "r": 0.05, "delta": 0.03})");
    const LevyModel m = model_from_json(doc);
    EXPECT_NEAR(m.drift, 1.0 / 3.0, 1e-15);
    EXPECT_EQ(m.side, JumpSide::SpectrallyNegative);
}

TEST(Io, ModelFromJsonErrors) {
    EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"side": "SN", "sigma": 0.2})")), DomainError);
    EXPECT_THROW(model_from_json(nlohmann::json::parse(
                     R"({"side": "XX", "sigma": 0.2, "drift": 0.1, "jump_rate": 1, "jump_param": 2})")),
                 DomainError);
    EXPECT_THROW(model_from_json(nlohmann::json::parse(
                     R"({"side": "SN", "sigma": 0.2, "drift": "calibrate", "jump_rate": 1, "jump_param": 2})")),
                 DomainError);
    EXPECT_THROW(model_from_json(nlohmann::json::parse(
                     R"({"side": "SN", "sigma": "x", "drift": 0.1, "jump_rate": 1, "jump_param": 2})")),
                 DomainError);
    EXPECT_THROW(load_model("/nonexistent/model.json"), std::runtime_error);
}

TEST(Io, ModelJsonRoundTrip) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyPositive);
    const LevyModel back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
    EXPECT_EQ(back.side, m.side);
    EXPECT_EQ(back.drift, m.drift);
    EXPECT_EQ(back.sigma, m.sigma);
}

TEST(Io, EstimateJsonKeys) {
    MCEstimate e;
    e.mean = 1.5;
    e.stderr_ = 0.01;
    e.n_paths = 100;
    e.seed = 7;
    const auto j = to_json(e);
    for (const char* key : {"mean", "stderr", "n_paths", "tail_bound", "seed"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_FALSE(j.contains("warning"));
}

TEST(Io, CsvRowsReEvaluateThroughLibrary) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyNegative);
    const PeriodicPricer pricer(m, testing_models::standard_option(OptionKind::Call));
    const ValueCurve c = value_at_optimum(pricer, log_grid(10.0, 500.0, 25));
    std::ostringstream out;
    write_curve_rows(out, c);
    std::istringstream in(out.str());
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string item; std::getline(ls, item, ',');) f.push_back(item);
        ASSERT_EQ(f.size(), 6u);
        const double s = std::strtod(f[0].c_str(), nullptr);
        const double barrier = std::strtod(f[3].c_str(), nullptr);
        EXPECT_EQ(std::strtod(f[1].c_str(), nullptr), pricer.value(c.log_barrier, std::log(s)));
        EXPECT_EQ(std::strtod(f[2].c_str(), nullptr), payoff(OptionKind::Call, 50.0, s));
        EXPECT_EQ(barrier, std::exp(c.log_barrier));
        EXPECT_EQ(f[4], "CallSN");
        EXPECT_EQ(f[5], "1");
        ++rows;
    }
    EXPECT_EQ(rows, 25u);
    EXPECT_STREQ(kCurveCsvHeader, "s,value,payoff,barrier,case,lambda");
}

TEST(Io, BarrierJsonHasDiagnostics) {
    const auto j = to_json(solve_barrier(testing_models::standard_model(JumpSide::SpectrallyNegative),
                                         testing_models::standard_option(OptionKind::Put)));
    EXPECT_EQ(j.at("case"), "PutSN");
    EXPECT_LE(j.at("normalized_residual").get<double>(), 1e-10);
    EXPECT_TRUE(j.contains("residual"));
}
