#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "perex/errors.hpp"
#include "perex/levy_model.hpp"
#include "perex/mc_oracle.hpp"
#include "perex/periodic_pricer.hpp"
#include "perex/scale_functions.hpp"

namespace perex {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline JumpSide parse_side(const std::string& s) {
    if (s == "SN" || s == "sn") return JumpSide::SpectrallyNegative;
    if (s == "SP" || s == "sp") return JumpSide::SpectrallyPositive;
    throw DomainError("unknown jump side '" + s + "' (expected SN or SP)");
}

/// Model document:
///   {"side": "SN"|"SP", "sigma": f, "drift": f|"calibrate", "jump_rate": f, "jump_param": f}
/// "r" and "delta" are required when drift is "calibrate".
inline LevyModel model_from_json(const nlohmann::json& doc) {
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key)) throw DomainError(std::string("model config: missing field '") + key + "'");
        return doc.at(key);
    };
    LevyModel m;
    try {
        m.side = parse_side(need("side").get<std::string>());
        m.sigma = need("sigma").get<double>();
        m.jump_rate = need("jump_rate").get<double>();
        m.jump_param = need("jump_param").get<double>();
        const auto& drift = need("drift");
        if (drift.is_string()) {
            if (drift.get<std::string>() != "calibrate")
                throw DomainError("model config: drift must be a number or \"calibrate\"");
            m.drift = calibrate_drift(m.sigma, m.jump_rate, m.jump_param, m.side, need("r").get<double>(),
                                      need("delta").get<double>());
        } else {
            m.drift = drift.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("model config: ") + e.what());
    }
    m.validate();
    return m;
}

inline LevyModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("model file '" + path + "': " + e.what());
    }
    return model_from_json(doc);
}

inline nlohmann::json to_json(const LevyModel& m) {
    return {{"side", std::string(to_string(m.side))},
            {"sigma", m.sigma},
            {"drift", m.drift},
            {"jump_rate", m.jump_rate},
            {"jump_param", m.jump_param}};
}

inline nlohmann::json to_json(const ScaleBasis& b) {
    return {{"q", b.q}, {"roots", b.roots}, {"weights", b.weights}};
}

inline nlohmann::json to_json(const BarrierSolution& s) {
    return {{"case", std::string(to_string(s.case_tag))},
            {"log_barrier", s.log_barrier},
            {"barrier", s.barrier},
            {"residual", s.residual},
            {"normalized_residual", s.normalized_residual()},
            {"iterations", s.iterations}};
}

inline nlohmann::json to_json(const MCEstimate& e) {
    nlohmann::json j = {{"mean", e.mean},
                        {"stderr", e.stderr_},
                        {"n_paths", e.n_paths},
                        {"tail_bound", e.truncation_bound},
                        {"seed", e.seed}};
    if (!e.warning.empty()) j["warning"] = e.warning;
    return j;
}

inline constexpr const char* kCurveCsvHeader = "s,value,payoff,barrier,case,lambda";

inline void write_curve_rows(std::ostream& out, const ValueCurve& curve) {
    const std::string barrier = format_double(std::exp(curve.log_barrier));
    const std::string lambda = format_double(curve.lambda);
    const std::string tag(to_string(curve.case_tag));
    for (std::size_t i = 0; i < curve.spots.size(); ++i) {
        out << format_double(curve.spots[i]) << ',' << format_double(curve.values[i]) << ','
            << format_double(curve.payoffs[i]) << ',' << barrier << ',' << tag << ',' << lambda << '\n';
    }
}

}  // namespace perex
