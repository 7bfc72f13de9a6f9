#include "dualdiv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "dualdiv/errors.hpp"

namespace dualdiv::io {

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw Error(Errc::InvalidInput, std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw Error(Errc::InvalidInput, "unknown field '" + key + "' in " + where);
    }
}

double number(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw Error(Errc::InvalidInput, std::string("missing field '") + key + "' in " + where);
    }
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw Error(Errc::InvalidInput, std::string("field '") + key + "' in " + where + " must be a number");
    }
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const char* where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::string text(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw Error(Errc::InvalidInput, std::string("field '") + key + "' in " + where + " must be a string");
    }
    return j.at(key).get<std::string>();
}

const json& object(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_object()) {
        throw Error(Errc::InvalidInput, std::string("field '") + key + "' in " + where + " must be an object");
    }
    return j.at(key);
}

json params_json(const DualModelParams& p) {
    return {{"c", p.c}, {"lambda", p.lambda}, {"beta", p.beta}};
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

LevyMeasureSpec levy_from_json(const json& j) {
    reject_unknown(j, {"kind", "eta", "rho", "gamma", "points"}, "levy");
    const std::string kind = text(j, "kind", "levy");
    const double gamma = number_or(j, "gamma", 0.0, "levy");
    if (kind == "zero") {
        reject_unknown(j, {"kind", "gamma"}, "levy (zero)");
        return LevyMeasureSpec::zero(gamma);
    }
    if (kind == "cpexp") {
        reject_unknown(j, {"kind", "eta", "rho", "gamma"}, "levy (cpexp)");
        return LevyMeasureSpec::compound_poisson_exp(number(j, "eta", "levy"), number(j, "rho", "levy"), gamma);
    }
    if (kind == "tabulated") {
        reject_unknown(j, {"kind", "points", "gamma"}, "levy (tabulated)");
        if (!j.contains("points") || !j.at("points").is_array()) {
            throw Error(Errc::InvalidInput, "tabulated levy measure needs a 'points' array");
        }
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw Error(Errc::InvalidInput, "levy points must be [z, density] pairs");
            }
            pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        return LevyMeasureSpec::tabulated(std::move(pts), gamma);
    }
    throw Error(Errc::InvalidInput, "unknown levy kind '" + kind + "'");
}

json levy_to_json(const LevyMeasureSpec& spec) {
    json j;
    switch (spec.kind) {
        case LevyMeasureSpec::Kind::Zero:
            j["kind"] = "zero";
            break;
        case LevyMeasureSpec::Kind::CompoundPoissonExp:
            j["kind"] = "cpexp";
            j["eta"] = spec.eta;
            j["rho"] = spec.rho;
            break;
        case LevyMeasureSpec::Kind::Tabulated: {
            j["kind"] = "tabulated";
            json pts = json::array();
            for (const auto& [z, v] : spec.points) pts.push_back({z, v});
            j["points"] = pts;
            break;
        }
    }
    j["gamma"] = spec.gamma;
    return j;
}

std::pair<DualModelParams, DiscountSpec> model_from_json(const json& j) {
    reject_unknown(j, {"c", "lambda", "beta", "discount"}, "model");
    DualModelParams p{number(j, "c", "model"), number(j, "lambda", "model"), number(j, "beta", "model")};
    const json& d = object(j, "discount", "model");
    reject_unknown(d, {"kind", "r", "m", "delta", "gamma", "levy"}, "discount");
    const std::string kind = text(d, "kind", "discount");
    const double r = number_or(d, "r", 0.0, "discount");
    const double m = number(d, "m", "discount");
    const double delta = number(d, "delta", "discount");
    if (kind == "gbm") {
        if (d.contains("levy") || d.contains("gamma")) {
            throw Error(Errc::InvalidInput, "gbm discount takes no 'gamma' or 'levy'");
        }
        return {p, DiscountSpec::gbm(r, m, delta)};
    }
    if (kind == "explevy") {
        LevyMeasureSpec levy = d.contains("levy") ? levy_from_json(object(d, "levy", "discount"))
                                                  : LevyMeasureSpec::zero();
        if (d.contains("gamma")) {
            const double gamma = number(d, "gamma", "discount");
            const bool levy_has_gamma = d.contains("levy") && d.at("levy").contains("gamma");
            if (levy_has_gamma && levy.gamma != gamma) {
                throw Error(Errc::InvalidInput, "discount.gamma and discount.levy.gamma disagree");
            }
            levy.gamma = gamma;
        }
        return {p, DiscountSpec::exp_levy(r, m, delta, std::move(levy))};
    }
    throw Error(Errc::InvalidInput, "unknown discount kind '" + kind + "'");
}

json model_to_json(const DualModelParams& params, const DiscountSpec& disc) {
    json d = {{"kind", disc.kind == DiscountSpec::Kind::Gbm ? "gbm" : "explevy"},
              {"r", disc.r},
              {"m", disc.m},
              {"delta", disc.delta}};
    if (disc.kind == DiscountSpec::Kind::ExpLevy) {
        d["gamma"] = disc.levy.gamma;
        d["levy"] = levy_to_json(disc.levy);
    }
    json j = params_json(params);
    j["discount"] = d;
    return j;
}

ValidatedModel load_model(const std::string& path) {
    const auto [params, disc] = model_from_json(read_json_file(path));
    return validate(params, disc);
}

json solution_to_json(const ThresholdSolution& sol, const DualModelParams& params) {
    json j = {{"kind", "threshold"},
              {"regime", regime_name(sol.regime)},
              {"xi", sol.xi},
              {"params", params_json(params)},
              {"roots", {{"alpha", sol.alpha}, {"r1", sol.r1}, {"s1", sol.s1}, {"s2", sol.s2}}},
              {"theta", sol.theta}};
    if (sol.regime == Regime::Threshold) {
        j["constants"] = {{"A", sol.A}, {"B", sol.B}};
        j["level"] = {{"xhat", sol.xhat}};
    } else {
        j["constants"] = json::object();
        j["level"] = json::object();
    }
    return j;
}

json solution_to_json(const BarrierSolution& sol, const DualModelParams& params) {
    return {{"kind", "barrier"},
            {"regime", "barrier"},
            {"params", params_json(params)},
            {"roots", {{"s3", sol.s3}, {"s4", sol.s4}}},
            {"constants", {{"K", sol.K}}},
            {"level", {{"b", sol.b}}},
            {"theta", sol.theta}};
}

ThresholdSolution threshold_from_json(const json& j) {
    reject_unknown(j, {"kind", "regime", "xi", "params", "roots", "constants", "level", "theta"}, "solution");
    if (text(j, "kind", "solution") != "threshold") {
        throw Error(Errc::InvalidInput, "solution kind is not 'threshold'");
    }
    ThresholdSolution sol;
    const std::string regime = text(j, "regime", "solution");
    if (regime == "threshold") {
        sol.regime = Regime::Threshold;
    } else if (regime != "alwaysmax") {
        throw Error(Errc::InvalidInput, "unknown regime '" + regime + "'");
    }
    sol.xi = number(j, "xi", "solution");
    sol.theta = number(j, "theta", "solution");
    const json& roots = object(j, "roots", "solution");
    sol.alpha = number(roots, "alpha", "roots");
    sol.r1 = number(roots, "r1", "roots");
    sol.s1 = number(roots, "s1", "roots");
    sol.s2 = number(roots, "s2", "roots");
    if (sol.regime == Regime::Threshold) {
        const json& k = object(j, "constants", "solution");
        sol.A = number(k, "A", "constants");
        sol.B = number(k, "B", "constants");
        sol.xhat = number(object(j, "level", "solution"), "xhat", "level");
    }
    return sol;
}

BarrierSolution barrier_from_json(const json& j) {
    reject_unknown(j, {"kind", "regime", "params", "roots", "constants", "level", "theta"}, "solution");
    if (text(j, "kind", "solution") != "barrier") {
        throw Error(Errc::InvalidInput, "solution kind is not 'barrier'");
    }
    BarrierSolution sol;
    sol.theta = number(j, "theta", "solution");
    const json& roots = object(j, "roots", "solution");
    sol.s3 = number(roots, "s3", "roots");
    sol.s4 = number(roots, "s4", "roots");
    sol.K = number(object(j, "constants", "solution"), "K", "constants");
    sol.b = number(object(j, "level", "solution"), "b", "level");
    return sol;
}

DualModelParams solution_params(const json& j) {
    const json& p = object(j, "params", "solution");
    reject_unknown(p, {"c", "lambda", "beta"}, "params");
    return {number(p, "c", "params"), number(p, "lambda", "params"), number(p, "beta", "params")};
}

json report_to_json(const ResidualReport& rep) {
    json pts = json::array();
    for (const auto& p : rep.points) {
        pts.push_back({{"x", p.x},
                       {"residual_or_operator", p.residual},
                       {"gradient_slack", p.gradient_slack},
                       {"branch", p.branch},
                       {"ok", p.ok}});
    }
    return {{"kind", rep.kind}, {"points", pts}, {"max_abs", rep.max_abs}, {"tol", rep.tol}, {"pass", rep.pass}};
}

void write_report_csv(std::ostream& os, const ResidualReport& rep) {
    os << "x,residual_or_operator,gradient_slack,branch\n";
    for (const auto& p : rep.points) {
        os << format_double(p.x) << ',' << format_double(p.residual) << ','
           << format_double(p.gradient_slack) << ',' << p.branch << '\n';
    }
}

void write_path_log_csv(std::ostream& os, const std::vector<PathEvent>& events) {
    os << "t_event,event_type,surplus_before,surplus_after,dividend_paid,discount_weight\n";
    for (const auto& e : events) {
        os << format_double(e.t) << ',' << event_type_name(e.type) << ',' << format_double(e.surplus_before)
           << ',' << format_double(e.surplus_after) << ',' << format_double(e.dividend_paid) << ','
           << format_double(e.discount_weight) << '\n';
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidInput, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidInput, "'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidInput, "cannot write '" + path + "'");
    out << text;
}

}  // namespace dualdiv::io
