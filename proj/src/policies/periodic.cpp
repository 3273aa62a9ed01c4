#include <algorithm>
#include <numeric>

#include "swlqr/errors.hpp"
#include "swlqr/policies.hpp"

namespace swlqr {

int PeriodicSchedule::base() const {
    return deltas.empty() ? 0 : *std::min_element(deltas.begin(), deltas.end());
}

int PeriodicSchedule::long_count() const {
    if (deltas.empty()) return 0;
    const int b = base();
    return static_cast<int>(std::count_if(deltas.begin(), deltas.end(), [b](int d) { return d > b; }));
}

std::vector<int> PeriodicSchedule::switch_times(int tau) const {
    std::vector<int> times;
    times.reserve(deltas.size());
    int t = -tau;
    for (int d : deltas) {
        t += d;
        times.push_back(t);
    }
    return times;
}

PeriodicSchedule build_periodic(int horizon, double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) throw ValidationError(ErrorCode::InvalidRate, "rate must lie in (0, 1]");
    if (horizon < 1) throw ValidationError(ErrorCode::InvalidHorizon, "horizon must be positive");
    SystemParams p;
    p.horizon = horizon;
    p.rate = rate;
    const int q0 = initial_budget(p);
    PeriodicSchedule s;
    if (q0 == 0) return s;
    const int base = horizon / q0;
    const int longs = horizon - q0 * base;
    s.deltas.reserve(static_cast<std::size_t>(q0));
    for (int n = 0; n < q0; ++n) {
        // Bresenham: interval n is long when floor((n+1)L/Q) steps past floor(nL/Q).
        const long hi = static_cast<long>(n + 1) * longs / q0;
        const long lo = static_cast<long>(n) * longs / q0;
        s.deltas.push_back(base + static_cast<int>(hi - lo));
    }
    return s;
}

PeriodicPolicy::PeriodicPolicy(const PeriodicSchedule& schedule, int horizon, int tau)
    : fires_(static_cast<std::size_t>(std::max(horizon, 0)), 0) {
    for (int t : schedule.switch_times(tau))
        if (t >= 0 && t < horizon) fires_[t] = 1;
}

int PeriodicPolicy::decide(const ScheduleView& v) const {
    if (v.budget_enforced && v.q_remaining <= 0) return 0;
    if (v.k < 0 || v.k >= static_cast<int>(fires_.size())) return 0;
    return fires_[v.k];
}

}  // namespace swlqr
