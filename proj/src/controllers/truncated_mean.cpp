#include <algorithm>
#include <cmath>

#include "swlqr/controllers.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

constexpr double kMinEventProb = 1e-12;

// Integrates over W_0..W_{m−1} restricted to A_m. acc[0] = Pr(A_m), acc[1 + i] = E[W_i; A_m].
class SlabQuadrature {
public:
    SlabQuadrature(const NoiseModel& noise, double a, const std::vector<double>& xi, double gamma, int points)
        : noise_(noise), a_(a), xi_(xi), gamma_(gamma), points_(points), m_(static_cast<int>(xi.size())) {
        path_.assign(xi.size(), 0.0);
        acc_.assign(xi.size() + 1, 0.0);
        const double r = noise.reach();
        lo_clip_ = -r;
        hi_clip_ = r;
    }

    const std::vector<double>& run() {
        level(0, 0.0, 1.0);
        return acc_;
    }

private:
    void level(int v, double s, double weight) {
        // Constraint v + 1 pins W_v to a slab of width 2γ.
        const double shift = xi_[static_cast<std::size_t>(v)] + a_ * s;
        double lo = -gamma_ - shift;
        double hi = gamma_ - shift;
        if (v == m_ - 1) {
            // Innermost axis in closed form.
            const double pr = weight * noise_.prob(lo, hi);
            acc_[0] += pr;
            for (int i = 0; i < v; ++i) acc_[static_cast<std::size_t>(1 + i)] += pr * path_[static_cast<std::size_t>(i)];
            acc_[static_cast<std::size_t>(1 + v)] += weight * noise_.partial_mean(lo, hi);
            return;
        }
        lo = std::max(lo, lo_clip_);
        hi = std::min(hi, hi_clip_);
        if (!(hi > lo)) return;
        // The Laplace density has a kink at 0; panels meet there.
        if (lo < 0.0 && hi > 0.0) {
            panel(v, s, weight, lo, 0.0);
            panel(v, s, weight, 0.0, hi);
        } else {
            panel(v, s, weight, lo, hi);
        }
    }

    void panel(int v, double s, double weight, double lo, double hi) {
        const int n = points_;
        const double h = (hi - lo) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double w = lo + i * h;
            const double simpson = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            const double f = weight * simpson * h / 3.0 * noise_.density(w);
            if (f == 0.0) continue;
            path_[static_cast<std::size_t>(v)] = w;
            level(v + 1, a_ * s + w, f);
        }
    }

    const NoiseModel& noise_;
    double a_;
    const std::vector<double>& xi_;
    double gamma_;
    int points_;
    int m_;
    double lo_clip_ = 0.0, hi_clip_ = 0.0;
    std::vector<double> path_;
    std::vector<double> acc_;
};

void check_event(double p) {
    if (!(p >= kMinEventProb))
        throw NumericalError(ErrorCode::EmptyEvent, "conditioning event has probability below 1e-12");
}

}  // namespace

TruncatedMean conditional_truncated_mean(const NoiseModel& noise, double a, const std::vector<double>& xi, double gamma,
                                         const TruncatedMeanOptions& opt) {
    if (!(gamma >= 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "gamma must be non-negative");
    if (opt.quadrature_points < 3 || opt.quadrature_points % 2 == 0)
        throw ValidationError(ErrorCode::InvalidArgument, "quadrature needs an odd point count of at least 3");
    const std::size_t m = xi.size();
    TruncatedMean out;
    out.c.assign(m, 0.0);
    if (m == 0 || std::isinf(gamma)) return out;

    if (noise.sigma == 0.0) {
        // W ≡ 0: the event is decided by ξ alone.
        const bool inside = std::all_of(xi.begin(), xi.end(), [&](double x) { return std::fabs(x) <= gamma; });
        out.event_prob = inside ? 1.0 : 0.0;
        check_event(out.event_prob);
        return out;
    }

    if (static_cast<int>(m) <= opt.max_quadrature_dim) {
        const auto acc = SlabQuadrature(noise, a, xi, gamma, opt.quadrature_points).run();
        out.event_prob = acc[0];
        check_event(out.event_prob);
        for (std::size_t i = 0; i < m; ++i) out.c[i] = acc[1 + i] / acc[0];
        return out;
    }

    // Sequential conditional sampling: draw each W_v inside its slab and carry
    // the slab probability as a likelihood weight.
    out.monte_carlo = true;
    Rng rng = make_rng(opt.seed, 0);
    std::vector<double> sw(m, 0.0), sww(m, 0.0), sw2(m, 0.0), path(m);
    double z = 0.0, z2 = 0.0;
    for (int n = 0; n < opt.mc_samples; ++n) {
        double weight = 1.0, s = 0.0;
        for (std::size_t v = 0; v < m && weight > 0.0; ++v) {
            const double shift = xi[v] + a * s;
            const double lo = -gamma - shift, hi = gamma - shift;
            const double p = noise.prob(lo, hi);
            weight *= p;
            if (p <= 0.0) break;
            path[v] = noise.sample_truncated(lo, hi, uniform_open(rng));
            s = a * s + path[v];
        }
        if (weight <= 0.0) continue;
        z += weight;
        z2 += weight * weight;
        for (std::size_t v = 0; v < m; ++v) {
            sw[v] += weight * path[v];
            sw2[v] += weight * weight * path[v];
            sww[v] += weight * weight * path[v] * path[v];
        }
    }
    const double n = opt.mc_samples;
    out.event_prob = z / n;
    check_event(out.event_prob);
    out.std_error.assign(m, 0.0);
    for (std::size_t v = 0; v < m; ++v) {
        out.c[v] = sw[v] / z;
        // Ratio estimator: Var ≈ Σ w²(W − C)² / (Σ w)².
        const double c = out.c[v];
        const double num = sww[v] - 2.0 * c * sw2[v] + c * c * z2;
        out.std_error[v] = std::sqrt(std::max(0.0, num)) / z;
    }
    return out;
}

}  // namespace swlqr
