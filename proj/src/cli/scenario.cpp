#include "swlqr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swlqr/controllers.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ValidationError(ErrorCode::InvalidScenario, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) bad("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception&) {
        bad(std::string("bad value for '") + key + "'");
    }
}

void read_number(const json& j, const char* key, double& into) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_number()) {
        into = v.get<double>();
    } else if (v.is_string() && (v == "inf" || v == "infinity")) {
        into = INFINITY;
    } else {
        bad(std::string("'") + key + "' must be a number");
    }
}

std::string trim(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json number(double v) { return std::isinf(v) ? json("inf") : json(v); }

}  // namespace

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::A: return "a";
        case SweepAxis::Rate: return "rate";
        case SweepAxis::Sigma: return "sigma";
    }
    return "a";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "a") return SweepAxis::A;
    if (name == "rate") return SweepAxis::Rate;
    if (name == "sigma") return SweepAxis::Sigma;
    bad("unknown sweep axis '" + std::string(name) + "'");
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> v;
    if (step <= 0.0) {
        v.push_back(start);
        return v;
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5 + 1e-9));
    for (long i = 0; i <= n; ++i) {
        // Trim accumulated roundoff so 0.5:1.4:0.05 yields 0.6, not 0.6000000000000001.
        const double x = start + static_cast<double>(i) * step;
        v.push_back(std::stod(trim(x)));
    }
    return v;
}

SweepSpec parse_grid(SweepAxis axis, std::string_view text) {
    SweepSpec s;
    s.axis = axis;
    std::string t(text);
    for (char& c : t)
        if (c == ':') c = ' ';
    std::istringstream is(t);
    if (!(is >> s.start >> s.stop >> s.step)) bad("grid must read start:stop:step");
    std::string rest;
    if (is >> rest) bad("grid must read start:stop:step");
    if (!(s.step > 0.0) || !(s.stop >= s.start) || !std::isfinite(s.stop))
        bad("grid needs step > 0 and stop >= start");
    return s;
}

Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("scenario is not valid JSON: ") + e.what());
    }
    only_keys(j, "scenario",
              {"params", "noise", "switching", "controller", "policies", "runs", "seed", "steady_window", "threads",
               "filter_grid", "sweep", "dp", "calibration", "divergence", "oracle"});
    Scenario s;
    if (j.contains("params")) {
        const json& p = j["params"];
        only_keys(p, "params", {"a", "b", "q", "r", "sigma_w", "tau", "rate", "horizon"});
        read_number(p, "a", s.params.a);
        read_number(p, "b", s.params.b);
        read_number(p, "q", s.params.q);
        read_number(p, "r", s.params.r);
        read_number(p, "sigma_w", s.params.sigma_w);
        read(p, "tau", s.params.tau);
        read_number(p, "rate", s.params.rate);
        read(p, "horizon", s.params.horizon);
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        s.noises.clear();
        if (n.is_string()) {
            s.noises.push_back(parse_noise_kind(n.get<std::string>()));
        } else if (n.is_array() && !n.empty()) {
            for (const auto& e : n) {
                if (!e.is_string()) bad("noise entries must be strings");
                s.noises.push_back(parse_noise_kind(e.get<std::string>()));
            }
        } else {
            bad("noise must be a name or a non-empty list of names");
        }
    }
    read(j, "switching", s.switching);
    read(j, "controller", s.controller);
    read(j, "policies", s.policies);
    read(j, "runs", s.runs);
    read(j, "seed", s.seed);
    read(j, "steady_window", s.steady_window);
    read(j, "threads", s.threads);
    read(j, "filter_grid", s.filter_grid);
    if (j.contains("sweep") && !j["sweep"].is_null()) {
        const json& w = j["sweep"];
        only_keys(w, "sweep", {"axis", "grid", "start", "stop", "step"});
        std::string axis = "a";
        read(w, "axis", axis);
        if (w.contains("grid")) {
            std::string grid;
            read(w, "grid", grid);
            s.sweep = parse_grid(parse_sweep_axis(axis), grid);
        } else {
            SweepSpec sw;
            sw.axis = parse_sweep_axis(axis);
            read_number(w, "start", sw.start);
            read_number(w, "stop", sw.stop);
            read_number(w, "step", sw.step);
            s.sweep = sw;
        }
    }
    if (j.contains("dp")) {
        only_keys(j["dp"], "dp", {"method", "grid_points"});
        read(j["dp"], "method", s.dp.method);
        read(j["dp"], "grid_points", s.dp.grid_points);
    }
    if (j.contains("calibration")) {
        only_keys(j["calibration"], "calibration", {"tol", "pilot_steps", "seed"});
        read_number(j["calibration"], "tol", s.calibration.tol);
        read_number(j["calibration"], "pilot_steps", s.calibration.pilot_steps);
        read(j["calibration"], "seed", s.calibration.seed);
    }
    if (j.contains("divergence")) {
        only_keys(j["divergence"], "divergence", {"state_limit", "mean_cost_limit", "mean_cost_limit_sigma2"});
        read_number(j["divergence"], "state_limit", s.divergence.state_limit);
        read_number(j["divergence"], "mean_cost_limit", s.divergence.mean_cost_limit);
        read_number(j["divergence"], "mean_cost_limit_sigma2", s.divergence.mean_cost_limit_sigma2);
    }
    if (j.contains("oracle")) {
        only_keys(j["oracle"], "oracle", {"values", "probs", "max_policies"});
        read(j["oracle"], "values", s.oracle.values);
        read(j["oracle"], "probs", s.oracle.probs);
        read_number(j["oracle"], "max_policies", s.oracle.max_policies);
    }
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    json j;
    j["params"] = {{"a", s.params.a},           {"b", s.params.b},     {"q", s.params.q},
                   {"r", s.params.r},           {"sigma_w", s.params.sigma_w}, {"tau", s.params.tau},
                   {"rate", s.params.rate},     {"horizon", s.params.horizon}};
    if (s.noises.size() == 1) {
        j["noise"] = to_string(s.noises.front());
    } else {
        j["noise"] = json::array();
        for (NoiseKind k : s.noises) j["noise"].push_back(to_string(k));
    }
    j["switching"] = s.switching;
    j["controller"] = s.controller;
    j["policies"] = s.policies;
    j["runs"] = s.runs;
    j["seed"] = s.seed;
    j["steady_window"] = s.steady_window;
    j["threads"] = s.threads;
    j["filter_grid"] = s.filter_grid;
    if (s.sweep)
        j["sweep"] = {{"axis", to_string(s.sweep->axis)},
                      {"start", s.sweep->start},
                      {"stop", s.sweep->stop},
                      {"step", s.sweep->step}};
    j["dp"] = {{"method", s.dp.method}, {"grid_points", s.dp.grid_points}};
    j["calibration"] = {{"tol", s.calibration.tol},
                        {"pilot_steps", s.calibration.pilot_steps},
                        {"seed", s.calibration.seed}};
    j["divergence"] = {{"state_limit", number(s.divergence.state_limit)},
                       {"mean_cost_limit", number(s.divergence.mean_cost_limit)},
                       {"mean_cost_limit_sigma2", s.divergence.mean_cost_limit_sigma2}};
    j["oracle"] = {{"values", s.oracle.values}, {"probs", s.oracle.probs}, {"max_policies", s.oracle.max_policies}};
    return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& s) {
    validate_params(s.params);
    if (s.noises.empty()) bad("at least one noise kind is required");
    if (s.runs < 1) bad("runs must be at least 1");
    if (s.steady_window < 1) bad("steady_window must be at least 1");
    if (s.filter_grid < 3 || s.filter_grid % 2 == 0) bad("filter_grid must be odd and at least 3");
    if (s.dp.method != "recursion" && s.dp.method != "bellman") bad("dp.method must be recursion or bellman");
    if (s.dp.grid_points < 3 || s.dp.grid_points % 2 == 0) bad("dp.grid_points must be odd and at least 3");
    if (!(s.calibration.tol > 0.0) || !(s.calibration.pilot_steps >= 1.0)) bad("bad calibration settings");
    if (s.switching != "all") {
        const SwitchingKind sw = parse_switching_kind(s.switching);
        if (s.controller != "all") {
            PolicySpec probe;
            probe.switching = sw;
            probe.controller = parse_controller_kind(s.controller);
            probe.table = std::make_shared<ThresholdTable>();
            validate_policy(probe);
        }
    } else if (s.controller != "all") {
        parse_controller_kind(s.controller);
    }
    if (s.sweep && !(s.sweep->step > 0.0 && s.sweep->stop >= s.sweep->start)) bad("sweep grid is empty");
}

}  // namespace swlqr
