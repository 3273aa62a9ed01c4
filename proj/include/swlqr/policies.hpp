#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "swlqr/core.hpp"
#include "swlqr/rng.hpp"

namespace swlqr {

// Only what a state-blind schedule may read. Bernoulli and periodic decisions
// take this view, so they cannot depend on x_k or s_m.
struct ScheduleView {
    int k = 0;
    int horizon = 0;
    int tau = 1;
    int q_remaining = 0;
    bool budget_enforced = true;
};

struct SwitchDecisionInput {
    int k = 0;
    double x_k = 0.0;
    double s_m = 0.0;  // disturbance accumulated since the last switch
    int m = 0;         // steps since the last switch
    BudgetState budget;
    int horizon = 0;
    int tau = 1;
    bool budget_enforced = true;  // false only in calibration pilots

    ScheduleView schedule() const { return {k, horizon, tau, budget.q_remaining(), budget_enforced}; }
};

// 0 at an exhausted budget, 1 once the budget covers every remaining effective
// step (k < N − τ and Q_k ≥ N − τ − k), otherwise no override.
std::optional<int> budget_override(const ScheduleView& v);

int decide_bernoulli(const ScheduleView& v, double rate, Rng& rng);

struct PeriodicSchedule {
    std::vector<int> deltas;

    int base() const;
    int long_count() const;
    // t_n = −τ + Δ_1 + … + Δ_n for n = 1..Q_0; the last one is N − τ.
    std::vector<int> switch_times(int tau) const;
};

// Q_0 = floor(N r_s) intervals of length floor(N/Q_0) or one more, summing to N,
// long ones spread as evenly as possible.
PeriodicSchedule build_periodic(int horizon, double rate);

class PeriodicPolicy {
public:
    PeriodicPolicy(const PeriodicSchedule& schedule, int horizon, int tau);
    // Fires on schedule unless the budget is exhausted; no surplus override.
    int decide(const ScheduleView& v) const;

private:
    std::vector<char> fires_;
};

// α_{kj} for k < N − τ and 0 ≤ j ≤ Q_0, normalized by σ_W²; the switch fires when S² ≥ α σ_W².
class ThresholdTable {
public:
    ThresholdTable() = default;
    ThresholdTable(int effective_horizon, int q0, double sigma_w);

    int effective_horizon() const { return k_; }
    int q0() const { return q0_; }
    double sigma_w() const { return sigma_w_; }
    void set_sigma_w(double s) { sigma_w_ = s; }

    double fallback_theta = 0.0;  // constant threshold on S² for the calibrated variant

    void set_alpha(int k, int j, double alpha);
    std::optional<double> alpha(int k, int j) const;

    bool operator==(const ThresholdTable&) const;

private:
    int k_ = 0;
    int q0_ = 0;
    double sigma_w_ = 0.0;
    std::vector<double> alpha_;  // NaN marks a missing cell
};

enum class ThresholdMode { Table, Constant };

// Throws ValidationError(MissingTableEntry) for a missing (k, j) with k < N − τ.
int decide_threshold(const SwitchDecisionInput& in, const ThresholdTable& t, ThresholdMode mode);

// Fires on |X_k| > γ.
int decide_state_based(const SwitchDecisionInput& in, double gamma);

// CSV with columns k, j, alpha after the versioned header comment.
void write_threshold_table(std::ostream& os, const ThresholdTable& t);
ThresholdTable read_threshold_table(std::istream& is, double sigma_w);

}  // namespace swlqr
