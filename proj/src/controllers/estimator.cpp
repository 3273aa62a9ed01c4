#include <algorithm>

#include "swlqr/controllers.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

std::string to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Optimal: return "optimal";
        case ControllerKind::Zoh: return "zoh";
        case ControllerKind::Impulsive: return "impulsive";
        case ControllerKind::StateBased: return "state_based";
    }
    return "optimal";
}

ControllerKind parse_controller_kind(std::string_view name) {
    if (name == "optimal") return ControllerKind::Optimal;
    if (name == "zoh") return ControllerKind::Zoh;
    if (name == "impulsive") return ControllerKind::Impulsive;
    if (name == "state_based") return ControllerKind::StateBased;
    throw ValidationError(ErrorCode::InvalidScenario, "unknown controller '" + std::string(name) + "'");
}

EstimatorState EstimatorState::bootstrap(int tau) {
    EstimatorState est;
    est.last_update_step = -tau;
    est.pending_inputs.assign(static_cast<std::size_t>(tau), 0.0);
    est.m = tau;
    return est;
}

void estimator_receive(EstimatorState& est, const SystemParams& p, const PipelineEntry& e, int k) {
    if (e.decision == 1) {
        double x = ipow(p.a, p.tau) * e.state;
        for (int j = 0; j < p.tau; ++j) x += ipow(p.a, p.tau - 1 - j) * p.b * est.pending_inputs[static_cast<std::size_t>(j)];
        est.x_hat = x;
        est.last_update_state = e.state;
        est.last_update_step = k - p.tau;
    }
    est.m = k - est.last_update_step;
}

void estimator_commit(EstimatorState& est, const SystemParams& p, double u) {
    std::rotate(est.pending_inputs.begin(), est.pending_inputs.begin() + 1, est.pending_inputs.end());
    est.pending_inputs.back() = u;
    est.x_hat = p.a * est.x_hat + p.b * u;
}

double control_optimal(const EstimatorState& est, double gain) { return -gain * est.x_hat; }

double control_zoh(const EstimatorState& est, double gain, int k, int tau, double u_prev) {
    return k == est.last_update_step + tau ? -gain * est.x_hat : u_prev;
}

double control_impulsive(const EstimatorState& est, const SystemParams& p, int k) {
    if (p.b == 0.0) throw ValidationError(ErrorCode::InvalidArgument, "impulsive control needs b != 0");
    return k == est.last_update_step + p.tau ? -(p.a / p.b) * est.x_hat : 0.0;
}

}  // namespace swlqr
