#include <cmath>

#include "swlqr/policies.hpp"

namespace swlqr {

std::optional<int> budget_override(const ScheduleView& v) {
    if (!v.budget_enforced) return std::nullopt;
    if (v.q_remaining <= 0) return 0;
    const int remaining = v.horizon - v.tau - v.k;
    if (remaining > 0 && v.q_remaining >= remaining) return 1;
    return std::nullopt;
}

int decide_bernoulli(const ScheduleView& v, double rate, Rng& rng) {
    // Draw unconditionally so the policy stream stays aligned across budget states.
    const bool coin = uniform_open(rng) < rate;
    if (auto forced = budget_override(v)) return *forced;
    return coin ? 1 : 0;
}

int decide_state_based(const SwitchDecisionInput& in, double gamma) {
    if (auto forced = budget_override(in.schedule())) return *forced;
    return std::fabs(in.x_k) > gamma ? 1 : 0;
}

}  // namespace swlqr
