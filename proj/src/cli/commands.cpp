#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "swlqr/cli.hpp"
#include "swlqr/csv.hpp"
#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

struct Combo {
    const char* label;
    SwitchingKind switching;
    ControllerKind controller;
};

// The full matrix, in output order.
const std::vector<Combo>& standard_combos() {
    static const std::vector<Combo> combos = {
        {"OPT", SwitchingKind::ThresholdTable, ControllerKind::Optimal},
        {"sym-opt", SwitchingKind::ThresholdConst, ControllerKind::Optimal},
        {"sym-zoh", SwitchingKind::ThresholdConst, ControllerKind::Zoh},
        {"sym-imp", SwitchingKind::ThresholdConst, ControllerKind::Impulsive},
        {"random-opt", SwitchingKind::Bernoulli, ControllerKind::Optimal},
        {"random-zoh", SwitchingKind::Bernoulli, ControllerKind::Zoh},
        {"random-imp", SwitchingKind::Bernoulli, ControllerKind::Impulsive},
        {"periodic-opt", SwitchingKind::Periodic, ControllerKind::Optimal},
        {"periodic-zoh", SwitchingKind::Periodic, ControllerKind::Zoh},
        {"periodic-imp", SwitchingKind::Periodic, ControllerKind::Impulsive},
        {"state-based", SwitchingKind::StateBased, ControllerKind::StateBased},
        // Off the standard matrix; reachable by naming switching and controller explicitly.
        {"table-zoh", SwitchingKind::ThresholdTable, ControllerKind::Zoh},
        {"table-imp", SwitchingKind::ThresholdTable, ControllerKind::Impulsive},
    };
    return combos;
}

constexpr std::size_t kStandardCount = 11;

bool selected(const Scenario& s, const Combo& c, std::size_t index) {
    if (!s.policies.empty()) return std::find(s.policies.begin(), s.policies.end(), c.label) != s.policies.end();
    const bool sw_all = s.switching == "all", ctl_all = s.controller == "all";
    if (index >= kStandardCount && (sw_all || ctl_all)) return false;
    if (!sw_all && parse_switching_kind(s.switching) != c.switching) return false;
    if (!ctl_all && parse_controller_kind(s.controller) != c.controller) return false;
    return true;
}

CalibrationOptions calibration_options(const Scenario& s) {
    CalibrationOptions o;
    o.tol = s.calibration.tol;
    o.pilot_steps = s.calibration.pilot_steps;
    o.seed = s.calibration.seed;
    o.filter_grid = s.filter_grid;
    return o;
}

std::shared_ptr<const ThresholdTable> solve_table(const Scenario& s, const SystemParams& p, const NoiseModel& noise) {
    if (s.dp.method == "bellman") return std::make_shared<ThresholdTable>(solve_bellman(p, noise).thresholds);
    DpOptions opt;
    opt.grid_points = s.dp.grid_points;
    return std::make_shared<ThresholdTable>(solve_dp(p, noise, opt).thresholds());
}

double relative_ci(double x, double ci) { return x != 0.0 ? ci / std::fabs(x) : 0.0; }

}  // namespace

const std::vector<std::string>& policy_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> v;
        for (const auto& c : standard_combos()) v.emplace_back(c.label);
        return v;
    }();
    return labels;
}

PolicyMatrix build_policy_matrix(const Scenario& s, const SystemParams& p, const NoiseModel& noise) {
    PolicyMatrix out;
    const auto& combos = standard_combos();
    for (const auto& name : s.policies)
        if (std::find(policy_labels().begin(), policy_labels().end(), name) == policy_labels().end())
            throw ValidationError(ErrorCode::InvalidScenario, "unknown policy label '" + name + "'");

    std::shared_ptr<const ThresholdTable> table;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        const Combo& c = combos[i];
        if (!selected(s, c, i)) continue;
        PolicySpec spec;
        spec.label = c.label;
        spec.switching = c.switching;
        spec.controller = c.controller;
        spec.filter_grid = s.filter_grid;
        switch (c.switching) {
            case SwitchingKind::ThresholdTable:
                if (!table) table = solve_table(s, p, noise);
                spec.table = table;
                break;
            case SwitchingKind::ThresholdConst:
                // σ_W = 0 leaves S ≡ 0 and X ≡ 0: no rate is reachable and every θ costs nothing.
                if (!out.theta)
                    out.theta = noise.sigma == 0.0 ? 0.0
                                                   : calibrate_rate(CalibrationFamily::Threshold, p, noise, p.rate,
                                                                    calibration_options(s)).parameter;
                spec.theta = *out.theta;
                break;
            case SwitchingKind::StateBased:
                if (!out.gamma)
                    out.gamma = noise.sigma == 0.0 ? 0.0
                                                   : calibrate_rate(CalibrationFamily::StateBased, p, noise, p.rate,
                                                                    calibration_options(s)).parameter;
                spec.gamma = *out.gamma;
                break;
            default: break;
        }
        out.policies.push_back(std::move(spec));
    }
    if (out.policies.empty()) throw ValidationError(ErrorCode::InvalidScenario, "the scenario selects no policy");
    return out;
}

void write_runstats_csv(std::ostream& os, const std::vector<RunStats>& stats) {
    csv::write_header(os, {"policy", "step", "mean_cost", "ci", "rate", "diverged_fraction"});
    for (const auto& st : stats)
        for (std::size_t k = 0; k < st.running_avg.size(); ++k)
            csv::write_row(os, {st.policy, csv::fmt(static_cast<int>(k)), csv::fmt(st.running_avg[k]),
                                csv::fmt(st.running_avg_ci[k]), csv::fmt(st.rate[k]), csv::fmt(st.diverged_fraction)});
}

void write_summary_csv(std::ostream& os, const std::vector<RunStats>& stats) {
    csv::write_header(os, {"policy", "steady_cost", "ci", "switch_rate", "diverged_fraction", "runs"});
    for (const auto& st : stats)
        csv::write_row(os, {st.policy, csv::fmt(st.steady_cost), csv::fmt(st.ci95), csv::fmt(st.switch_rate),
                            csv::fmt(st.diverged_fraction), csv::fmt(st.runs)});
}

std::vector<SweepRow> run_sweep(const Scenario& s) {
    if (!s.sweep) throw ValidationError(ErrorCode::InvalidScenario, "sweep needs an axis and a grid");
    const auto values = s.sweep->values();
    if (values.empty()) throw ValidationError(ErrorCode::InvalidScenario, "sweep grid is empty");

    MonteCarloConfig cfg;
    cfg.runs = s.runs;
    cfg.seed = s.seed;
    cfg.steady_window = s.steady_window;
    cfg.threads = s.threads;
    cfg.divergence = s.divergence;

    std::vector<SweepRow> rows;
    for (double v : values) {
        SystemParams p = s.params;
        switch (s.sweep->axis) {
            case SweepAxis::A: p.a = v; break;
            case SweepAxis::Rate: p.rate = v; break;
            case SweepAxis::Sigma: p.sigma_w = v; break;
        }
        validate_params(p);
        std::map<std::string, std::pair<double, double>> gaussian;  // policy → (cost, ci)
        const std::size_t first = rows.size();
        for (NoiseKind kind : s.noises) {
            const NoiseModel noise{kind, p.sigma_w};
            const PolicyMatrix m = build_policy_matrix(s, p, noise);
            for (const auto& spec : m.policies) {
                const RunStats st = run_mc(BoundPolicy(spec, p, noise), cfg);
                SweepRow row;
                row.axis_value = v;
                row.policy = spec.label;
                row.noise = kind;
                row.steady_cost = st.steady_cost;
                row.ci = st.ci95;
                row.diverged_fraction = st.diverged_fraction;
                rows.push_back(row);
                if (kind == NoiseKind::Gaussian) gaussian[spec.label] = {st.steady_cost, st.ci95};
            }
        }
        // Normalized difference against the Gaussian run of the same policy; the CI
        // combines both relative half-widths (independent samples).
        for (std::size_t i = first; i < rows.size(); ++i) {
            SweepRow& r = rows[i];
            const auto it = gaussian.find(r.policy);
            if (it == gaussian.end() || !std::isfinite(it->second.first) || !std::isfinite(r.steady_cost) ||
                it->second.first == 0.0) {
                r.normalized_diff = std::numeric_limits<double>::quiet_NaN();
                r.normalized_diff_ci = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const auto [g, gci] = it->second;
            const double ratio = r.steady_cost / g;
            r.normalized_diff = ratio - 1.0;
            r.normalized_diff_ci = r.noise == NoiseKind::Gaussian
                                       ? 0.0
                                       : std::fabs(ratio) * std::hypot(relative_ci(r.steady_cost, r.ci), relative_ci(g, gci));
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    csv::write_header(os, {"axis_value", "policy", "noise", "steady_cost", "ci", "diverged_fraction", "normalized_diff",
                           "normalized_diff_ci"});
    for (const auto& r : rows)
        csv::write_row(os, {csv::fmt(r.axis_value), r.policy, to_string(r.noise), csv::fmt(r.steady_cost), csv::fmt(r.ci),
                            csv::fmt(r.diverged_fraction), csv::fmt(r.normalized_diff), csv::fmt(r.normalized_diff_ci)});
}

}  // namespace swlqr
