#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "swlqr/core.hpp"
#include "swlqr/measure.hpp"
#include "swlqr/noise.hpp"

namespace swlqr {

enum class ControllerKind { Optimal, Zoh, Impulsive, StateBased };

std::string to_string(ControllerKind kind);
ControllerKind parse_controller_kind(std::string_view name);

// Conditional mean of X_k given the controller's information, valid whenever
// silence carries no information (every symmetric policy).
struct EstimatorState {
    double x_hat = 0.0;
    double last_update_state = 0.0;  // X_{t} as received
    int last_update_step = 0;        // t, the sample time of the latest update
    std::vector<double> pending_inputs;  // U_{k−τ}..U_{k−1}, oldest first
    int m = 0;                       // k − t

    // As if X = 0 had been received from k = −τ with no input applied since.
    static EstimatorState bootstrap(int tau);
};

// Step k with the pipeline output for sample time k − τ: re-anchor
// x̂ = a^τ X_{k−τ} + Σ_j a^{τ−1−j} b U_{k−τ+j} on a switch, otherwise keep the prediction.
void estimator_receive(EstimatorState& est, const SystemParams& p, const PipelineEntry& e, int k);
// Records U_k and predicts x̂_{k+1} = a x̂_k + b U_k.
void estimator_commit(EstimatorState& est, const SystemParams& p, double u);

double control_optimal(const EstimatorState& est, double gain);
// −L x̂ at the instant an update lands (k = t + τ), otherwise the held input.
double control_zoh(const EstimatorState& est, double gain, int k, int tau, double u_prev);
// −(a/b) x̂ at the instant an update lands, 0 otherwise. Throws if b = 0.
double control_impulsive(const EstimatorState& est, const SystemParams& p, int k);

struct TruncatedMeanOptions {
    int quadrature_points = 129;  // odd, per axis
    int max_quadrature_dim = 3;
    int mc_samples = 100000;
    std::uint64_t seed = 0x7275636b;
};

struct TruncatedMean {
    std::vector<double> c;    // C_i = E[W_i | A_m], i = 0..m−1
    double event_prob = 1.0;  // Pr(A_m)
    bool monte_carlo = false;
    std::vector<double> std_error;  // per C_i, Monte Carlo only
};

// A_m = ∩_{j=1..m} {|ξ_j + Σ_{i<j} a^{j−1−i} W_i| ≤ γ}. Nested quadrature over the exact
// slab intervals for m ≤ max_quadrature_dim, sequential conditional sampling beyond.
// Throws NumericalError(EmptyEvent) when Pr(A_m) < 1e-12.
TruncatedMean conditional_truncated_mean(const NoiseModel& noise, double a, const std::vector<double>& xi, double gamma,
                                         const TruncatedMeanOptions& opt = {});

// Controller estimate for the state-based policy D = 1{|X| > γ}. Silence at a step
// where the switch had budget says |X| ≤ γ, so E[X_k | info] carries
// a^τ E[S | silences] on top of the silence-blind prediction. The conditional law of S
// is tracked on a grid.
class StateBasedEstimator {
public:
    StateBasedEstimator(const SystemParams& p, const NoiseModel& noise, double gamma, int grid_points = 257,
                        bool budget_enforced = true);

    void receive(const PipelineEntry& e, int k);
    void commit(double u);

    double x_hat() const { return x_hat_; }
    double xi() const { return xi_; }                     // known part of X at the sample frontier
    double silence_mean() const { return s_law_.mean(); }  // E[S | silences since the update]
    int steps_since_update() const { return m_; }

private:
    SystemParams p_;
    NoiseModel noise_;
    double gamma_;
    int grid_points_;
    bool budget_enforced_;
    int q_;  // budget at the sample frontier

    double x_hat_ = 0.0;
    double xi_ = 0.0;
    int m_ = 0;
    GridMeasure s_law_;
    std::vector<double> inputs_;  // U_{k−τ−1}..U_{k−1}
};

double control_state_based(const StateBasedEstimator& sb, double gain);

}  // namespace swlqr
