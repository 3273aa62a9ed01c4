#include "swlqr/core.hpp"

#include <cmath>
#include <string>

#include "swlqr/errors.hpp"

namespace swlqr {

SystemParams validate_params(const SystemParams& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.a) || !finite(p.b))
        throw ValidationError(ErrorCode::InvalidArgument, "plant gains a, b must be finite");
    if (p.tau < 1)
        throw ValidationError(ErrorCode::NonCausal,
                              "tau = " + std::to_string(p.tau) + "; a delay of at least one step is required");
    if (!(p.q > 0.0) || !finite(p.q))
        throw ValidationError(ErrorCode::InvalidWeight, "q must be positive");
    if (!(p.r > 0.0) || !finite(p.r))
        throw ValidationError(ErrorCode::InvalidWeight, "r must be positive");
    if (!(p.sigma_w >= 0.0) || !finite(p.sigma_w))
        throw ValidationError(ErrorCode::InvalidNoise, "sigma_w must be finite and nonnegative");
    if (!(p.rate > 0.0 && p.rate <= 1.0))
        throw ValidationError(ErrorCode::InvalidRate, "rate must lie in (0, 1]");
    if (p.horizon <= p.tau + 1)
        throw ValidationError(ErrorCode::InvalidHorizon, "horizon must exceed tau + 1");
    return p;
}

int initial_budget(const SystemParams& p) {
    return static_cast<int>(std::floor(p.horizon * p.rate + 1e-9));
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

void BudgetState::consume(int d) {
    if (d == 0) return;
    if (q_remaining_ <= 0)
        throw ValidationError(ErrorCode::InvalidArgument, "switch requested with an exhausted budget");
    --q_remaining_;
    ++switches_used_;
}

DelayPipeline::DelayPipeline(int tau) : slots_(static_cast<std::size_t>(tau < 1 ? 1 : tau)) {}

DelayPipeline DelayPipeline::bootstrap(int tau) {
    DelayPipeline pipe(tau);
    pipe.slots_[0] = PipelineEntry{1, 0.0};
    return pipe;
}

PipelineEntry DelayPipeline::push(PipelineEntry in) {
    PipelineEntry out = slots_[head_];
    slots_[head_] = in;
    head_ = (head_ + 1) % slots_.size();
    return out;
}

}  // namespace swlqr
