#include <cmath>
#include <limits>

#include "swlqr/engine.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/lqr.hpp"

namespace swlqr {

std::string to_string(SwitchingKind kind) {
    switch (kind) {
        case SwitchingKind::Bernoulli: return "bernoulli";
        case SwitchingKind::Periodic: return "periodic";
        case SwitchingKind::ThresholdTable: return "threshold_table";
        case SwitchingKind::ThresholdConst: return "threshold_const";
        case SwitchingKind::StateBased: return "state_based";
    }
    return "bernoulli";
}

SwitchingKind parse_switching_kind(std::string_view name) {
    if (name == "bernoulli") return SwitchingKind::Bernoulli;
    if (name == "periodic") return SwitchingKind::Periodic;
    if (name == "threshold_table") return SwitchingKind::ThresholdTable;
    if (name == "threshold_const") return SwitchingKind::ThresholdConst;
    if (name == "state_based") return SwitchingKind::StateBased;
    throw ValidationError(ErrorCode::InvalidScenario, "unknown switching policy '" + std::string(name) + "'");
}

void validate_policy(const PolicySpec& spec) {
    const bool sb_switch = spec.switching == SwitchingKind::StateBased;
    const bool sb_ctrl = spec.controller == ControllerKind::StateBased;
    if (sb_switch != sb_ctrl)
        throw ValidationError(ErrorCode::InvalidScenario,
                              "state-based switching and the state-based controller only come as a pair");
    if (spec.switching == SwitchingKind::ThresholdTable && !spec.table)
        throw ValidationError(ErrorCode::InvalidScenario, "threshold_table switching needs a solved threshold table");
    if (spec.switching == SwitchingKind::ThresholdConst && !(spec.theta >= 0.0))
        throw ValidationError(ErrorCode::InvalidScenario, "threshold must be non-negative");
    if (sb_switch && !(spec.gamma >= 0.0))
        throw ValidationError(ErrorCode::InvalidScenario, "gamma must be non-negative");
    if (spec.rate && !(*spec.rate >= 0.0 && *spec.rate <= 1.0))
        throw ValidationError(ErrorCode::InvalidRate, "Bernoulli rate must lie in [0, 1]");
}

BoundPolicy::BoundPolicy(const PolicySpec& spec, const SystemParams& p, const NoiseModel& noise)
    : spec_(spec), p_(validate_params(p)), noise_(noise) {
    validate_policy(spec);
    gain_ = riccati_steady(p).L;
    rate_ = spec.rate.value_or(p.rate);
    if (spec.switching == SwitchingKind::Periodic) periodic_.emplace(build_periodic(p.horizon, p.rate), p.horizon, p.tau);
    if (spec.switching == SwitchingKind::ThresholdTable &&
        (spec.table->effective_horizon() != effective_horizon(p) || spec.table->q0() != initial_budget(p)))
        throw ValidationError(ErrorCode::InvalidScenario, "threshold table was solved for a different lattice");
    if (spec.controller == ControllerKind::Impulsive && p.b == 0.0)
        throw ValidationError(ErrorCode::InvalidArgument, "impulsive control needs b != 0");
}

LoopState BoundPolicy::init() const {
    LoopState ls;
    ls.est = EstimatorState::bootstrap(p_.tau);
    if (spec_.switching == SwitchingKind::StateBased)
        ls.sb.emplace(p_, noise_, spec_.gamma, spec_.filter_grid, spec_.budget_enforced);
    ls.pipe = DelayPipeline::bootstrap(p_.tau);
    ls.budget = BudgetState(initial_budget(p_));
    ls.m = p_.tau;  // the bootstrap switch sits at k = −τ
    return ls;
}

int BoundPolicy::decide(const LoopState& ls, Rng& policy_rng, bool& forced) const {
    SwitchDecisionInput in;
    in.k = ls.k;
    in.x_k = ls.x;
    in.s_m = ls.s_m;
    in.m = ls.m;
    in.budget = ls.budget;
    in.horizon = p_.horizon;
    in.tau = p_.tau;
    in.budget_enforced = spec_.budget_enforced;
    const ScheduleView view = in.schedule();
    forced = budget_override(view).has_value();
    switch (spec_.switching) {
        case SwitchingKind::Bernoulli: return decide_bernoulli(view, rate_, policy_rng);
        case SwitchingKind::Periodic:
            forced = spec_.budget_enforced && view.q_remaining <= 0;
            return periodic_->decide(view);
        case SwitchingKind::ThresholdTable: return decide_threshold(in, *spec_.table, ThresholdMode::Table);
        case SwitchingKind::ThresholdConst: {
            ThresholdTable t;
            t.fallback_theta = spec_.theta;
            return decide_threshold(in, t, ThresholdMode::Constant);
        }
        case SwitchingKind::StateBased: return decide_state_based(in, spec_.gamma);
    }
    return 0;
}

double BoundPolicy::control(LoopState& ls) const {
    switch (spec_.controller) {
        case ControllerKind::Optimal: return control_optimal(ls.est, gain_);
        case ControllerKind::Zoh: return control_zoh(ls.est, gain_, ls.k, p_.tau, ls.u_prev);
        case ControllerKind::Impulsive: return control_impulsive(ls.est, p_, ls.k);
        case ControllerKind::StateBased: return control_state_based(*ls.sb, gain_);
    }
    return 0.0;
}

StepRecord BoundPolicy::step(LoopState& ls, Rng& noise_rng, Rng& policy_rng) const {
    StepRecord rec;
    rec.x = ls.x;
    rec.s_m = ls.s_m;
    rec.m = ls.m;

    // (1) the switch observes X_k and decides.
    const int d = decide(ls, policy_rng, rec.forced);
    rec.decision = d;
    if (d == 1) {
        if (spec_.budget_enforced) ls.budget.consume(1);
        ++ls.switches;
    }

    // (2) the pipeline takes (D_k, X_k) and emits (D_{k−τ}, X_{k−τ}).
    const PipelineEntry out = ls.pipe.push({d, ls.x});

    // (3) the estimator re-anchors or coasts.
    estimator_receive(ls.est, p_, out, ls.k);
    if (ls.sb) ls.sb->receive(out, ls.k);
    rec.x_hat = ls.sb ? ls.sb->x_hat() : ls.est.x_hat;

    // (4) control, (5) cost.
    const double u = control(ls);
    rec.u = u;
    rec.stage_cost = p_.q * ls.x * ls.x + p_.r * u * u;
    ls.cost_acc += rec.stage_cost;

    // (6) evolve; S restarts at a switch instant.
    const double w = noise_.sample(noise_rng);
    ls.x = p_.a * ls.x + p_.b * u + w;
    ls.s_m = (d == 1 ? 0.0 : p_.a * ls.s_m) + w;
    ls.m = d == 1 ? 1 : ls.m + 1;
    estimator_commit(ls.est, p_, u);
    if (ls.sb) ls.sb->commit(u);
    ls.u_prev = u;
    ++ls.k;
    return rec;
}

bool detect_divergence(const LoopState& ls, const SystemParams& p, const DivergenceCriteria& c) {
    if (!std::isfinite(ls.x) || !std::isfinite(ls.cost_acc)) return true;
    if (std::fabs(ls.x) > c.state_limit) return true;
    double limit = c.mean_cost_limit;
    const double scaled = c.mean_cost_limit_sigma2 * p.sigma_w * p.sigma_w;
    if (scaled > 0.0) limit = std::min(limit, scaled);
    return ls.cost_acc / p.horizon > limit;
}

double RunRecord::steady_cost(int window) const {
    if (diverged) return std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(stage_costs.size());
    const int w = std::min(std::max(window, 1), n);
    double s = 0.0;
    for (int k = n - w; k < n; ++k) s += stage_costs[static_cast<std::size_t>(k)];
    return s / w;
}

RunRecord simulate_run(const BoundPolicy& policy, std::uint64_t seed, const DivergenceCriteria& c) {
    const SystemParams& p = policy.params();
    const int n = p.horizon;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    RunRecord r;
    r.stage_costs.assign(static_cast<std::size_t>(n), nan);
    r.decisions.assign(static_cast<std::size_t>(n), 0);
    r.err_sq.assign(static_cast<std::size_t>(n), nan);
    r.gap_sq.assign(static_cast<std::size_t>(n), nan);

    Rng noise_rng = make_rng(seed, 0);
    Rng policy_rng = make_rng(seed, 1);
    LoopState ls = policy.init();
    const double gain = policy.gain();
    for (int k = 0; k < n; ++k) {
        const StepRecord rec = policy.step(ls, noise_rng, policy_rng);
        const auto i = static_cast<std::size_t>(k);
        r.stage_costs[i] = rec.stage_cost;
        r.decisions[i] = rec.decision;
        const double err = rec.x - rec.x_hat;
        r.err_sq[i] = err * err;
        const double gap = gain != 0.0 ? rec.x + rec.u / gain : err;
        r.gap_sq[i] = gap * gap;
        if (detect_divergence(ls, p, c)) {
            ls.diverged = true;
            r.diverged = true;
            r.diverged_at = k;
            break;
        }
    }
    r.terminal_x = ls.x;
    r.switches = ls.switches;
    r.budget_left = ls.budget.q_remaining();
    return r;
}

}  // namespace swlqr
