#pragma once

#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claims.hpp"
#include "counting.hpp"
#include "engine.hpp"
#include "fitting.hpp"
#include "gof.hpp"

namespace nefrisk::io {

using json = nlohmann::json;

inline json to_json(const CountingDist& d, std::optional<double> measured_acceptance = std::nullopt) {
    json j;
    j["family"] = std::string(to_string(family_of(d)));
    j["p"] = dispersion_of(d);
    j["m"] = mean_of(d);
    j["theta"] = theta_of(d);
    j["kappa"] = kappa_of(d);
    j["f0"] = std::visit([](const auto& x) { return x.f0(); }, d);
    j["f1"] = nullptr;
    j["C"] = nullptr;
    j["K"] = nullptr;
    j["i_star"] = nullptr;
    if (auto c = dominating_constant_of(d)) j["C"] = *c;
    if (const auto* a = std::get_if<ArcsineDist>(&d)) {
        j["f1"] = a->f1();
        j["K"] = a->bound().K;
        j["i_star"] = a->bound().i_star;
    } else if (const auto* t = std::get_if<TakacsDist>(&d)) {
        j["K"] = t->bound().K;
    }
    j["measured_acceptance_rate"] = measured_acceptance ? json(*measured_acceptance) : json(nullptr);
    return j;
}

inline json to_json(const ClaimDist& d, std::optional<double> measured_acceptance = std::nullopt) {
    json j;
    j["family"] = std::string(to_string(family_of(d)));
    j["theta"] = theta_of(d);
    j["kappa"] = kappa_of(d);
    j["mean"] = mean_of(d);
    j["variance"] = variance_of(d);
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PositiveStableClaim>) {
                j["alpha"] = c.alpha;
                j["p"] = c.vf_power();
                j["sigma"] = c.sigma();
            } else {
                j["p"] = c.p;
            }
        },
        d);
    j["measured_acceptance_rate"] = measured_acceptance ? json(*measured_acceptance) : json(nullptr);
    return j;
}

inline json to_json(const SampleMoments& m) {
    return {{"mean", m.mean}, {"variance", m.variance}, {"count", m.count}};
}

inline SampleMoments moments_from_json(const json& j) {
    return {j.at("mean").get<double>(), j.at("variance").get<double>(), j.value("count", std::uint64_t{0})};
}

inline json to_json(const FittedModel& f) {
    json j;
    j["counting"] = {{"family", std::string(to_string(f.counting_family))}, {"p", f.p_N}, {"m", f.m_N}};
    json params;
    if (f.claim_family == ClaimFamily::positive_stable) {
        params = {{"alpha", f.claim_dispersion}, {"theta", f.claim_theta}};
    } else {
        params = {{"p", f.claim_dispersion}, {"theta", f.claim_theta}};
    }
    j["claim"] = {{"family", std::string(to_string(f.claim_family))}, {"params", params}};
    j["provenance"] = {{"source", f.source},
                       {"count_moments", to_json(f.count_moments)},
                       {"claim_moments", to_json(f.claim_moments)}};
    return j;
}

inline FittedModel fitted_model_from_json(const json& j) {
    FittedModel f;
    const auto& c = j.at("counting");
    f.counting_family = parse_counting_family(c.at("family").get<std::string>());
    f.p_N = c.at("p").get<double>();
    f.m_N = c.at("m").get<double>();
    const auto& y = j.at("claim");
    f.claim_family = parse_claim_family(y.at("family").get<std::string>());
    const auto& params = y.at("params");
    f.claim_dispersion = f.claim_family == ClaimFamily::positive_stable ? params.at("alpha").get<double>()
                                                                         : params.at("p").get<double>();
    f.claim_theta = params.at("theta").get<double>();
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        f.source = p.value("source", std::string{});
        if (p.contains("count_moments")) f.count_moments = moments_from_json(p.at("count_moments"));
        if (p.contains("claim_moments")) f.claim_moments = moments_from_json(p.at("claim_moments"));
    }
    return f;
}

inline json run_record(const CompoundModel& model, const EstimateResult& r) {
    json claim = to_json(model.claim);
    json params;
    if (family_of(model.claim) == ClaimFamily::positive_stable) {
        params = {{"alpha", claim["alpha"]}, {"theta", claim["theta"]}};
    } else {
        params = {{"p", claim["p"]}, {"theta", claim["theta"]}};
    }
    return {
        {"model",
         {{"counting",
           {{"family", std::string(to_string(family_of(model.counting)))},
            {"p", dispersion_of(model.counting)},
            {"m", mean_of(model.counting)}}},
          {"claim", {{"family", claim["family"]}, {"params", params}}}}},
        {"x", r.level_x},
        {"method", std::string(to_string(r.method))},
        {"M", r.M},
        {"seed", r.seed},
        {"workers", r.workers},
        {"estimate", r.estimate},
        {"std_error", r.std_error},
        {"theta_star", r.theta_star},
        {"tweak_branch_fraction", r.tweak_fraction},
        {"converged", r.converged},
        {"runtime_ms", r.runtime_ms},
    };
}

inline json to_json(const GofResult& g) {
    json bins = json::array();
    for (const auto& b : g.bins) {
        bins.push_back({{"upper", std::isfinite(b.upper) ? json(b.upper) : json("inf")},
                        {"observed", b.observed},
                        {"expected", b.expected}});
    }
    return {{"statistic", g.statistic}, {"dof", g.dof}, {"p_value", g.p_value}, {"bins", bins}};
}

// ---------------------------------------------------------------------------
// Estimate tables: "x,M,estimate,std_error", 3 significant digits.
// ---------------------------------------------------------------------------

struct EstimateRow {
    double x = 0.0;
    std::uint64_t M = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

inline std::string sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

inline constexpr const char* kEstimateHeader = "x,M,estimate,std_error";

inline std::string format_row(const EstimateRow& r) {
    std::ostringstream os;
    char xb[32];
    std::snprintf(xb, sizeof xb, "%.10g", r.x);
    os << xb << ',' << r.M << ',';
    // a level without a result (budget hit, infeasible tilt) leaves blanks
    if (std::isfinite(r.estimate)) {
        os << sci3(r.estimate) << ',' << sci3(r.std_error);
    } else {
        os << ',';
    }
    return os.str();
}

inline void write_estimate_csv(std::ostream& os, const std::vector<EstimateRow>& rows) {
    os << kEstimateHeader << '\n';
    for (const auto& r : rows) os << format_row(r) << '\n';
}

inline std::vector<EstimateRow> read_estimate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kEstimateHeader) {
        throw DataError("estimate CSV: missing header");
    }
    std::vector<EstimateRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f(1);
        for (char ch : line) {
            if (ch == ',') {
                f.emplace_back();
            } else if (ch != '\r') {
                f.back().push_back(ch);
            }
        }
        if (f.size() != 4) {
            throw DataError("estimate CSV: expected 4 fields: " + line);
        }
        const std::string &a = f[0], &b = f[1], &c = f[2], &d = f[3];
        auto num = [](const std::string& v) {
            return v.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(v);
        };
        rows.push_back({std::stod(a), std::stoull(b), num(c), num(d)});
    }
    return rows;
}

/// Rounds like the CSV does, so parse(emit(r)) can be compared exactly.
inline EstimateRow rounded(const EstimateRow& r) {
    const std::string line = format_row(r);
    return {std::stod(line.substr(0, line.find(','))), r.M, std::stod(sci3(r.estimate)), std::stod(sci3(r.std_error))};
}

} // namespace nefrisk::io
