#include "swlqr/lqr.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "swlqr/errors.hpp"

namespace swlqr {

double riccati_map(const SystemParams& p, double P) {
    const double abP = p.a * p.b * P;
    return p.q + p.a * p.a * P - abP * abP / (p.r + p.b * p.b * P);
}

double riccati_gain(const SystemParams& p, double P) { return p.a * p.b * P / (p.r + p.b * p.b * P); }

RiccatiSolution riccati_finite(const SystemParams& p) {
    const int n = p.horizon;
    RiccatiSolution sol;
    sol.p_seq.assign(static_cast<std::size_t>(n) + 1, 0.0);
    sol.gain_seq.assign(static_cast<std::size_t>(n), 0.0);
    sol.p_seq[n] = p.q;
    for (int k = n - 1; k >= 0; --k) {
        const double next = sol.p_seq[k + 1];
        sol.gain_seq[k] = riccati_gain(p, next);
        sol.p_seq[k] = riccati_map(p, next);
    }
    try {
        const SteadyRiccati ss = riccati_steady(p);
        sol.p_ss = ss.P;
        sol.gain_ss = ss.L;
    } catch (const NumericalError&) {
        sol.p_ss = std::numeric_limits<double>::infinity();
        sol.gain_ss = std::numeric_limits<double>::quiet_NaN();
    }
    return sol;
}

SteadyRiccati riccati_steady(const SystemParams& p, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "tol must be positive");
    double P = p.q;
    for (int it = 1; it <= max_iter; ++it) {
        const double next = riccati_map(p, P);
        if (!std::isfinite(next)) break;
        if (std::fabs(next - P) < tol) return {next, riccati_gain(p, next), it};
        P = next;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "Riccati iteration did not settle; last iterate P = " << P;
    throw NumericalError(ErrorCode::NonConvergence, msg.str());
}

double error_weight(const SystemParams& p) {
    const SteadyRiccati ss = riccati_steady(p);
    return ss.L * ss.L * (p.r + p.b * p.b * ss.P);
}

double equivalent_cost(const SystemParams& p, double err_sq_mean, double x0_sq_mean) {
    const SteadyRiccati ss = riccati_steady(p);
    const RiccatiSolution fin = riccati_finite(p);
    const double w = ss.L * ss.L * (p.r + p.b * p.b * ss.P);
    return fin.p_seq[0] / p.horizon * x0_sq_mean + w * err_sq_mean + ss.P * p.sigma_w * p.sigma_w;
}

}  // namespace swlqr
