#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swlqr/controllers.hpp"
#include "swlqr/core.hpp"
#include "swlqr/noise.hpp"
#include "swlqr/policies.hpp"
#include "swlqr/rng.hpp"

namespace swlqr {

enum class SwitchingKind { Bernoulli, Periodic, ThresholdTable, ThresholdConst, StateBased };

std::string to_string(SwitchingKind kind);
SwitchingKind parse_switching_kind(std::string_view name);

// One switching rule paired with one controller.
struct PolicySpec {
    std::string label;
    SwitchingKind switching = SwitchingKind::Bernoulli;
    ControllerKind controller = ControllerKind::Optimal;
    std::optional<double> rate;  // Bernoulli firing probability; defaults to the scenario rate
    std::shared_ptr<const ThresholdTable> table;  // ThresholdTable switching
    double theta = 0.0;                           // ThresholdConst: fire on S² ≥ θ
    double gamma = 0.0;                           // StateBased: fire on |X| > γ
    int filter_grid = 257;
    bool budget_enforced = true;
};

// Throws ValidationError(InvalidScenario) on an impossible pairing.
void validate_policy(const PolicySpec& spec);

// A run is flagged once |X_k| > state_limit or cost_acc / N exceeds
// min(mean_cost_limit, mean_cost_limit_sigma2 · σ_W²). Stable loops stay near a few σ_W²
// per stage; a mean-square unstable loop grows past any fixed multiple. 0 disables the
// σ-scaled bound.
struct DivergenceCriteria {
    double state_limit = 1e8;
    double mean_cost_limit = 1e9;
    double mean_cost_limit_sigma2 = 50.0;

    bool operator==(const DivergenceCriteria&) const = default;
};

struct LoopState {
    int k = 0;
    double x = 0.0;
    EstimatorState est;
    std::optional<StateBasedEstimator> sb;
    DelayPipeline pipe{1};
    BudgetState budget;
    int switches = 0;
    double s_m = 0.0;  // disturbance accumulated since the last switch instant
    int m = 0;         // steps since the last switch instant
    double cost_acc = 0.0;
    double u_prev = 0.0;
    bool diverged = false;
};

// What happened during one step.
struct StepRecord {
    int decision = 0;
    bool forced = false;  // the budget rules, not the policy, decided
    double x = 0.0;
    double s_m = 0.0;  // before the decision
    int m = 0;
    double x_hat = 0.0;
    double u = 0.0;
    double stage_cost = 0.0;
};

// A policy bound to a plant: gains and schedules resolved once.
class BoundPolicy {
public:
    BoundPolicy(const PolicySpec& spec, const SystemParams& p, const NoiseModel& noise);

    const PolicySpec& spec() const { return spec_; }
    const SystemParams& params() const { return p_; }
    const NoiseModel& noise() const { return noise_; }
    double gain() const { return gain_; }

    LoopState init() const;
    // observe → decide → pipeline → estimator → control → cost → evolve.
    StepRecord step(LoopState& ls, Rng& noise_rng, Rng& policy_rng) const;

private:
    int decide(const LoopState& ls, Rng& policy_rng, bool& forced) const;
    double control(LoopState& ls) const;

    PolicySpec spec_;
    SystemParams p_;
    NoiseModel noise_;
    double gain_ = 0.0;
    double rate_ = 0.0;
    std::optional<PeriodicPolicy> periodic_;
};

bool detect_divergence(const LoopState& ls, const SystemParams& p, const DivergenceCriteria& c = {});

struct RunRecord {
    std::vector<double> stage_costs;  // k = 0..N−1, NaN after divergence
    std::vector<int> decisions;
    std::vector<double> err_sq;       // (X_k − X̂_k)²
    std::vector<double> gap_sq;       // (X_k + U_k / L)²
    double terminal_x = 0.0;
    int switches = 0;
    int budget_left = 0;
    bool diverged = false;
    int diverged_at = -1;

    double steady_cost(int window) const;
};

RunRecord simulate_run(const BoundPolicy& policy, std::uint64_t seed, const DivergenceCriteria& c = {});

struct MonteCarloConfig {
    int runs = 100;
    std::uint64_t seed = 0;
    int steady_window = 20;
    int threads = 0;  // 0: hardware concurrency
    DivergenceCriteria divergence;
    bool keep_runs = false;
};

struct RunStats {
    std::string policy;
    int runs = 0;
    int diverged_runs = 0;
    double diverged_fraction = 0.0;
    // Over non-diverged runs, per step k.
    std::vector<double> stage_cost;
    std::vector<double> running_avg;
    std::vector<double> running_avg_ci;
    std::vector<double> rate;  // mean of Σ_{i≤k} D_i / (k + 1), all runs
    double steady_cost = 0.0;  // +inf when every run diverged
    double ci95 = 0.0;         // 1.96 sd / √n over per-run steady costs; 0 for one run
    double switch_rate = 0.0;  // mean of ΣD / N
    // Per-run averages over k < N, for the cost identity.
    double total_cost = 0.0;  // (Σ_{k<N} stage + q X_N²) / N
    double total_cost_se = 0.0;
    double err_sq = 0.0;
    double err_sq_se = 0.0;
    double gap_sq = 0.0;
    double gap_sq_se = 0.0;
    std::vector<RunRecord> records;  // only with keep_runs
};

RunStats run_mc(const BoundPolicy& policy, const MonteCarloConfig& cfg);

// Sample mean and standard error; se = 0 for fewer than two samples.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};
MeanSe mean_se(const std::vector<double>& xs);

// Does S_m lean against the silence-blind part ξ_k = X_k − S_m on steps where the
// policy freely chose silence? Per bin of m, the statistic is the run-level mean
// of sign(ξ_k) S_m / σ_W; for a symmetric policy it is 0 in expectation.
struct SymmetryBin {
    int m = 0;
    double mean = 0.0;
    double se = 0.0;
    int runs = 0;
};
struct SymmetryDiagnostic {
    std::vector<SymmetryBin> bins;
    double pooled_mean = 0.0;
    double pooled_se = 0.0;
    double z = 0.0;
    int samples = 0;
};
SymmetryDiagnostic symmetry_diagnostic(const BoundPolicy& policy, int runs, std::uint64_t seed, int threads = 0);

enum class CalibrationFamily { Threshold, StateBased };

struct CalibrationOptions {
    double tol = 0.01;
    double pilot_steps = 1e4;
    std::uint64_t seed = 0x63616c6962ULL;
    int max_iter = 100;
    int filter_grid = 257;
};

struct CalibrationResult {
    double parameter = 0.0;  // θ on S² or γ on |X|
    double pilot_rate = 0.0;
    int iterations = 0;
};

// Empirical switching rate of an unconstrained pilot at parameter value v.
double pilot_rate(CalibrationFamily family, const SystemParams& p, const NoiseModel& noise, double v,
                  const CalibrationOptions& opt = {});

// Bisection on [0, upper], upper doubled until the pilot rate falls below target.
// Throws NumericalError(CalibrationFailure) when no value reaches the target within tol.
CalibrationResult calibrate_rate(CalibrationFamily family, const SystemParams& p, const NoiseModel& noise, double target,
                                 const CalibrationOptions& opt = {});

}  // namespace swlqr
