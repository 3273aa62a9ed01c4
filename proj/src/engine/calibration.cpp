#include <cmath>
#include <sstream>

#include "swlqr/engine.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

PolicySpec pilot_spec(CalibrationFamily family, double v, int filter_grid) {
    PolicySpec spec;
    spec.label = "pilot";
    spec.budget_enforced = false;
    if (family == CalibrationFamily::Threshold) {
        // S does not depend on the controller, so any controller gives the same rate.
        spec.switching = SwitchingKind::ThresholdConst;
        spec.controller = ControllerKind::Optimal;
        spec.theta = v;
    } else {
        spec.switching = SwitchingKind::StateBased;
        spec.controller = ControllerKind::StateBased;
        spec.gamma = v;
        spec.filter_grid = filter_grid;
    }
    return spec;
}

[[noreturn]] void fail(const std::string& why) { throw NumericalError(ErrorCode::CalibrationFailure, why); }

}  // namespace

double pilot_rate(CalibrationFamily family, const SystemParams& p, const NoiseModel& noise, double v,
                  const CalibrationOptions& opt) {
    const BoundPolicy policy(pilot_spec(family, v, opt.filter_grid), p, noise);
    MonteCarloConfig cfg;
    cfg.runs = static_cast<int>(std::ceil(opt.pilot_steps / p.horizon));
    cfg.seed = opt.seed;
    // The pilot only counts switches; a run cut short would bias the rate.
    cfg.divergence.state_limit = INFINITY;
    cfg.divergence.mean_cost_limit = INFINITY;
    cfg.divergence.mean_cost_limit_sigma2 = 0.0;
    return run_mc(policy, cfg).switch_rate;
}

CalibrationResult calibrate_rate(CalibrationFamily family, const SystemParams& p, const NoiseModel& noise, double target,
                                 const CalibrationOptions& opt) {
    validate_params(p);
    if (!(target > 0.0 && target <= 1.0)) throw ValidationError(ErrorCode::InvalidRate, "target rate must lie in (0, 1]");
    if (!(opt.tol > 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "tolerance must be positive");

    CalibrationResult res;
    auto rate = [&](double v) {
        ++res.iterations;
        return pilot_rate(family, p, noise, v, opt);
    };
    auto done = [&](double v, double r) {
        res.parameter = v;
        res.pilot_rate = r;
        return res;
    };

    const double r0 = rate(0.0);
    if (std::fabs(r0 - target) <= opt.tol) return done(0.0, r0);
    if (r0 < target) fail("the pilot rate at parameter 0 is already below the target");

    const double scale = noise.sigma > 0.0 ? noise.sigma : 1.0;
    double hi = family == CalibrationFamily::Threshold ? scale * scale : scale;
    double r_hi = rate(hi);
    for (int doubling = 0; r_hi > target; ++doubling) {
        if (doubling >= 60) fail("the pilot rate does not fall below the target");
        hi *= 2.0;
        r_hi = rate(hi);
    }
    if (std::fabs(r_hi - target) <= opt.tol) return done(hi, r_hi);

    double lo = 0.0;
    while (res.iterations < opt.max_iter) {
        if (hi - lo <= 1e-12 * hi) break;
        const double mid = 0.5 * (lo + hi);
        const double r = rate(mid);
        if (std::fabs(r - target) <= opt.tol) return done(mid, r);
        (r > target ? lo : hi) = mid;
    }
    std::ostringstream msg;
    msg << "no parameter reaches rate " << target << " within " << opt.tol << "; the rate map jumps near " << hi;
    fail(msg.str());
}

}  // namespace swlqr
