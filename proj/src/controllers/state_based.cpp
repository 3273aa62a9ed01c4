#include <algorithm>
#include <cmath>

#include "swlqr/controllers.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/policies.hpp"

namespace swlqr {

StateBasedEstimator::StateBasedEstimator(const SystemParams& p, const NoiseModel& noise, double gamma, int grid_points,
                                         bool budget_enforced)
    : p_(validate_params(p)),
      noise_(noise),
      gamma_(gamma),
      grid_points_(grid_points),
      budget_enforced_(budget_enforced),
      q_(initial_budget(p)),
      m_(p.tau),
      s_law_(GridMeasure::point(0.0)),
      inputs_(static_cast<std::size_t>(p.tau + 1), 0.0) {
    if (!(gamma >= 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "gamma must be non-negative");
    if (grid_points < 3 || grid_points % 2 == 0)
        throw ValidationError(ErrorCode::InvalidArgument, "grid size must be odd and at least 3");
}

void StateBasedEstimator::receive(const PipelineEntry& e, int k) {
    const int i = k - p_.tau;  // sample frontier
    if (e.decision == 1) {
        xi_ = e.state;
        s_law_ = GridMeasure::point(0.0);
        m_ = p_.tau;  // k − t with t = k − τ
        if (i >= 0) --q_;
    } else {
        xi_ = p_.a * xi_ + p_.b * inputs_[0];
        ++m_;
        // No disturbance acts before k = 0, so S stays at 0 through the bootstrap entries.
        if (i >= 1) s_law_ = s_law_.pushed(p_.a, noise_, grid_points_);
        // Silence only says |X_i| ≤ γ when the switch was free to fire.
        const bool informative = i >= 0 && !budget_override({i, p_.horizon, p_.tau, q_, budget_enforced_}).has_value();
        if (informative && s_law_.size() == 1) {
            // A point mass: silence is a yes/no check of |X_i| ≤ γ, closed at the edge.
            if (!(std::fabs(xi_ + s_law_.center()) <= gamma_))
                throw NumericalError(ErrorCode::EmptyEvent, "observed silence contradicts a known state");
        } else if (informative && !std::isinf(gamma_)) {
            const double before = s_law_.mass();
            GridMeasure kept = s_law_.restricted(-gamma_ - xi_, gamma_ - xi_);
            const double mass = kept.mass();
            if (!(mass >= 1e-12 * before))
                throw NumericalError(ErrorCode::EmptyEvent, "observed silence has vanishing probability under the filter");
            kept.scale(1.0 / mass);
            s_law_ = std::move(kept);
        }
    }

    double x = ipow(p_.a, p_.tau) * (xi_ + s_law_.mean());
    for (int j = 0; j < p_.tau; ++j) x += ipow(p_.a, p_.tau - 1 - j) * p_.b * inputs_[static_cast<std::size_t>(1 + j)];
    x_hat_ = x;
}

void StateBasedEstimator::commit(double u) {
    std::rotate(inputs_.begin(), inputs_.begin() + 1, inputs_.end());
    inputs_.back() = u;
}

double control_state_based(const StateBasedEstimator& sb, double gain) { return -gain * sb.x_hat(); }

}  // namespace swlqr
