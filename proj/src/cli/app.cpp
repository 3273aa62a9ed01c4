#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "swlqr/cli.hpp"
#include "swlqr/csv.hpp"
#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/lqr.hpp"
#include "swlqr/oracle.hpp"

namespace swlqr {

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::string axis;
    std::string grid;
    std::string noise;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "scenario JSON file");
    cmd->add_option("--out", f.out, "output directory; CSV goes to stdout without it");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--runs", f.runs, "Monte Carlo runs");
    cmd->add_option("--noise", f.noise, "gaussian|uniform|laplace, comma-separated for sweeps");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) parts.push_back(cur);
    return parts;
}

const char* default_grid(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::A: return "0.5:1.4:0.05";
        case SweepAxis::Rate: return "0.1:1:0.05";
        case SweepAxis::Sigma: return "1:20:1";
    }
    return "0.5:1.4:0.05";
}

Scenario resolve(const Flags& f) {
    Scenario s = f.config.empty() ? Scenario{} : load_scenario(f.config);
    if (f.seed) s.seed = *f.seed;
    if (f.runs) s.runs = *f.runs;
    if (!f.noise.empty()) {
        s.noises.clear();
        for (const auto& n : split(f.noise, ',')) s.noises.push_back(parse_noise_kind(n));
    }
    if (!f.axis.empty() || !f.grid.empty()) {
        const SweepAxis axis = !f.axis.empty() ? parse_sweep_axis(f.axis) : (s.sweep ? s.sweep->axis : SweepAxis::A);
        if (!f.grid.empty())
            s.sweep = parse_grid(axis, f.grid);
        else if (s.sweep)
            s.sweep->axis = axis;
        else
            s.sweep = parse_grid(axis, default_grid(axis));
    }
    validate_scenario(s);
    return s;
}

// CSV goes to DIR/name with --out, to stdout otherwise.
void emit(const Flags& f, std::ostream& out, const std::string& name, const std::function<void(std::ostream&)>& write) {
    if (f.out.empty()) {
        write(out);
        return;
    }
    std::filesystem::create_directories(f.out);
    const auto path = std::filesystem::path(f.out) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    write(os);
    out << "wrote " << path.string() << "\n";
}

std::string num(double v) { return csv::fmt(v); }

int cmd_riccati(const Flags& f, std::ostream& out) {
    const Scenario s = resolve(f);
    const SteadyRiccati ss = riccati_steady(s.params);
    const RiccatiSolution fin = riccati_finite(s.params);
    out << "P = " << std::setprecision(10) << ss.P << "\n";
    out << "L = " << std::setprecision(10) << ss.L << "\n";
    out << "iterations = " << ss.iterations << "\n";
    auto table = [&](std::ostream& os) {
        csv::write_header(os, {"k", "P", "L"});
        for (int k = 0; k <= s.params.horizon; ++k) {
            const double gain = k < s.params.horizon ? fin.gain_seq[static_cast<std::size_t>(k)] : std::nan("");
            csv::write_row(os, {csv::fmt(k), num(fin.p_seq[static_cast<std::size_t>(k)]), num(gain)});
        }
    };
    if (f.out.empty())
        table(out);
    else
        emit(f, out, "riccati.csv", table);
    return 0;
}

int cmd_solve_dp(const Flags& f, std::ostream& out) {
    const Scenario s = resolve(f);
    const NoiseModel noise{s.noises.front(), s.params.sigma_w};
    DpOptions opt;
    opt.grid_points = s.dp.grid_points;
    const DpTables t = solve_dp(s.params, noise, opt);
    emit(f, out, "dp_tables.csv", [&](std::ostream& os) { write_dp_tables(os, t); });
    if (!f.out.empty()) {
        const ThresholdTable th = s.dp.method == "bellman" ? solve_bellman(s.params, noise).thresholds : t.thresholds();
        emit(f, out, "thresholds.csv", [&](std::ostream& os) { write_threshold_table(os, th); });
        out << "value = " << num(t.value) << " (" << t.outer_iterations << " sweeps, max evenness defect "
            << num(t.max_evenness_defect) << ")\n";
    }
    return 0;
}

MonteCarloConfig mc_config(const Scenario& s) {
    MonteCarloConfig cfg;
    cfg.runs = s.runs;
    cfg.seed = s.seed;
    cfg.steady_window = s.steady_window;
    cfg.threads = s.threads;
    cfg.divergence = s.divergence;
    return cfg;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    const Scenario s = resolve(f);
    const NoiseModel noise{s.noises.front(), s.params.sigma_w};
    const PolicyMatrix m = build_policy_matrix(s, s.params, noise);
    std::vector<RunStats> stats;
    for (const auto& spec : m.policies) stats.push_back(run_mc(BoundPolicy(spec, s.params, noise), mc_config(s)));
    emit(f, out, "runstats.csv", [&](std::ostream& os) { write_runstats_csv(os, stats); });
    if (!f.out.empty()) {
        emit(f, out, "summary.csv", [&](std::ostream& os) { write_summary_csv(os, stats); });
        if (m.theta) out << "theta = " << num(*m.theta) << "\n";
        if (m.gamma) out << "gamma = " << num(*m.gamma) << "\n";
        for (const auto& st : stats)
            out << std::left << std::setw(14) << st.policy << " steady " << std::setw(12) << num(st.steady_cost)
                << " ± " << std::setw(12) << num(st.ci95) << " rate " << std::setw(8) << num(st.switch_rate)
                << " diverged " << num(st.diverged_fraction) << "\n";
    }
    return 0;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
    Scenario s = resolve(f);
    if (!s.sweep) s.sweep = parse_grid(SweepAxis::A, default_grid(SweepAxis::A));
    const auto rows = run_sweep(s);
    emit(f, out, "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rows); });
    return 0;
}

int cmd_calibrate(const Flags& f, std::ostream& out) {
    const Scenario s = resolve(f);
    const NoiseModel noise{s.noises.front(), s.params.sigma_w};
    CalibrationOptions opt;
    opt.tol = s.calibration.tol;
    opt.pilot_steps = s.calibration.pilot_steps;
    opt.seed = s.calibration.seed;
    opt.filter_grid = s.filter_grid;
    const CalibrationResult th = calibrate_rate(CalibrationFamily::Threshold, s.params, noise, s.params.rate, opt);
    const CalibrationResult ga = calibrate_rate(CalibrationFamily::StateBased, s.params, noise, s.params.rate, opt);
    out << "theta = " << num(th.parameter) << " (pilot rate " << num(th.pilot_rate) << ")\n";
    out << "gamma = " << num(ga.parameter) << " (pilot rate " << num(ga.pilot_rate) << ")\n";
    if (!f.out.empty())
        emit(f, out, "calibration.csv", [&](std::ostream& os) {
            csv::write_header(os, {"family", "target", "parameter", "pilot_rate", "iterations"});
            csv::write_row(os, {"threshold", num(s.params.rate), num(th.parameter), num(th.pilot_rate), csv::fmt(th.iterations)});
            csv::write_row(os, {"state_based", num(s.params.rate), num(ga.parameter), num(ga.pilot_rate), csv::fmt(ga.iterations)});
        });
    return 0;
}

int cmd_oracle_check(const Flags& f, std::ostream& out) {
    const Scenario s = resolve(f);
    const DiscreteNoise noise = DiscreteNoise::make(s.oracle.values, s.oracle.probs);
    OracleOptions opt;
    opt.max_policies = s.oracle.max_policies;
    const OracleReport r = oracle_enumerate(s.params, noise, opt);
    const DpTables rec = solve_dp(s.params, noise);
    const double gap = r.bellman_value - r.unrestricted_min;
    out << "instance: N = " << s.params.horizon << ", tau = " << s.params.tau << ", Q0 = " << r.q0
        << ", a = " << num(s.params.a) << "\n";
    out << "policies enumerated = " << num(r.policies) << "\n";
    out << "enumerated optimum = " << num(r.unrestricted_min) << "\n";
    out << "symmetric optimum = " << num(r.symmetric_min) << "\n";
    out << "threshold optimum = " << num(r.threshold_min) << "\n";
    out << "DP value (exact Bellman) = " << num(r.bellman_value) << "\n";
    out << "DP value (coefficient recursion) = " << num(rec.value) << "\n";
    out << "gap = " << num(gap) << "\n";
    out << "symmetric threshold minimizer = " << (r.threshold_attains_min ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < r.minimizers.size(); ++i) {
        const auto& pol = r.minimizers[i];
        out << "minimizer " << i << (pol.symmetric ? " symmetric" : "") << (pol.threshold ? " threshold" : "") << ":";
        for (int k = 0; k < r.effective_horizon; ++k)
            for (int j = 1; j <= r.q0; ++j) {
                const double cut = pol.fire_cut[static_cast<std::size_t>(k) * (r.q0 + 1) + j];
                out << " k" << k << "j" << j << "=" << num(cut);
            }
        out << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delayed switched LQR experiments"};
    app.require_subcommand(1);
    Flags f;
    std::function<int()> action;

    auto* riccati = app.add_subcommand("riccati", "steady and finite-horizon Riccati solution");
    auto* solve = app.add_subcommand("solve-dp", "threshold lattice coefficients");
    auto* simulate = app.add_subcommand("simulate", "running-average cost per policy");
    auto* sweep = app.add_subcommand("sweep", "steady cost over a parameter grid");
    auto* calibrate = app.add_subcommand("calibrate", "thresholds matching the target switching rate");
    auto* oracle = app.add_subcommand("oracle-check", "exhaustive policy enumeration on a small instance");
    for (auto* cmd : {riccati, solve, simulate, sweep, calibrate, oracle}) add_common(cmd, f);
    sweep->add_option("--axis", f.axis, "a|rate|sigma");
    sweep->add_option("--grid", f.grid, "start:stop:step");

    riccati->callback([&] { action = [&] { return cmd_riccati(f, out); }; });
    solve->callback([&] { action = [&] { return cmd_solve_dp(f, out); }; });
    simulate->callback([&] { action = [&] { return cmd_simulate(f, out); }; });
    sweep->callback([&] { action = [&] { return cmd_sweep(f, out); }; });
    calibrate->callback([&] { action = [&] { return cmd_calibrate(f, out); }; });
    oracle->callback([&] { action = [&] { return cmd_oracle_check(f, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    try {
        return action ? action() : 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace swlqr
