#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/kernels.hpp"

namespace swlqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// V_{k}(j, ·) in units of σ² = 1. Either a quadratic s e² + c (zero budget),
// or base + φ(e) with φ ≤ 0 piecewise linear on nodes m h, |m| ≤ M, and 0 beyond.
struct ValueRep {
    bool quadratic = false;
    double s = 0.0;
    double base = 0.0;
    double h = 0.0;
    std::vector<double> phi;  // index m + M

    int half() const { return static_cast<int>(phi.size() / 2); }
};

// Node cap per side of φ. Cells whose cut reaches far into the tail (a > 1 with
// little budget left) get a coarser step instead of millions of nodes.
constexpr int kMaxHalf = 4096;

// y ↦ E V(y + W) for one value representation, W ~ unit-variance noise.
class Expectation {
public:
    Expectation(const ValueRep& v, const NoiseModel& unit) : rep_(v) {
        if (v.quadratic || v.phi.empty()) return;
        const double h = v.h;
        const int d_max = std::max(1, static_cast<int>(std::ceil(unit.reach() / h)));
        std::vector<double> kern(static_cast<std::size_t>(2 * d_max + 1));
        for (int d = -d_max; d <= d_max; ++d) {
            const double lo = d == -d_max ? -kInf : (d - 0.5) * h;
            const double hi = d == d_max ? kInf : (d + 0.5) * h;
            kern[static_cast<std::size_t>(d + d_max)] = unit.prob(lo, hi);
        }
        const int m = v.half();
        half_ = m + d_max;
        g_.assign(static_cast<std::size_t>(2 * half_ + 1), 0.0);
        // g[i] = Σ_d K[d] φ[i + d]: φ sits at offset d_max inside g's index range.
        std::vector<double> padded(static_cast<std::size_t>(2 * half_ + 1 + 2 * d_max), 0.0);
        std::copy(v.phi.begin(), v.phi.end(), padded.begin() + 2 * d_max);
        for (int d = -d_max; d <= d_max; ++d)
            kernels::axpy(kern[static_cast<std::size_t>(d + d_max)], padded.data() + d_max + d, g_.data(), g_.size());
    }

    double operator()(double y) const {
        if (rep_.quadratic) return rep_.s * (y * y + 1.0) + rep_.base;
        if (g_.empty()) return rep_.base;
        const double f = y / rep_.h + half_;
        if (f <= 0.0 || f >= static_cast<double>(g_.size() - 1)) return rep_.base;
        const auto i = static_cast<std::size_t>(f);
        const double t = f - static_cast<double>(i);
        return rep_.base + (1.0 - t) * g_[i] + t * g_[i + 1];
    }

private:
    const ValueRep& rep_;
    int half_ = 0;
    std::vector<double> g_;
};

}  // namespace

BellmanSolution solve_bellman(const SystemParams& p, const NoiseModel& noise, const BellmanOptions& opt) {
    validate_params(p);
    if (!(opt.step > 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "Bellman grid step must be positive");
    const int K = effective_horizon(p);
    const int Q = initial_budget(p);
    const double geo = geo_tau(p.a, p.tau);
    const double a2tau = ipow(p.a, 2 * p.tau);
    const double h = opt.step;
    const NoiseModel unit{noise.kind, 1.0};

    BellmanSolution sol;
    sol.thresholds = ThresholdTable(K, Q, noise.sigma);
    std::vector<ValueRep> next(static_cast<std::size_t>(Q + 1));  // V_K ≡ 0
    for (auto& v : next) v.h = h;

    for (int k = K - 1; k >= 0; --k) {
        std::vector<ValueRep> cur(static_cast<std::size_t>(Q + 1));
        std::vector<Expectation> ev;
        ev.reserve(next.size());
        for (const auto& v : next) ev.emplace_back(v, unit);

        for (int j = 0; j <= Q; ++j) {
            ValueRep& v = cur[static_cast<std::size_t>(j)];
            v.h = h;
            if (j == 0) {
                const ValueRep& n = next[0];
                v.quadratic = true;
                v.s = a2tau + p.a * p.a * n.s;
                v.base = geo + n.s + n.base;
                sol.thresholds.set_alpha(k, 0, kInf);
                continue;
            }
            if (j >= K - k) {
                v.base = (K - k) * geo;
                sol.thresholds.set_alpha(k, j, 0.0);
                continue;
            }
            const Expectation& stay = ev[static_cast<std::size_t>(j)];
            const double w1 = ev[static_cast<std::size_t>(j - 1)](0.0);
            auto w0 = [&](double e) { return a2tau * e * e + stay(p.a * e); };

            double cut;  // e*: switch iff |e| ≥ e*
            if (w0(0.0) >= w1) {
                cut = 0.0;
            } else if (a2tau == 0.0) {
                cut = kInf;
            } else {
                double hi = std::sqrt(std::max(0.0, w1 - (K - k - 1) * geo) / a2tau);
                while (w0(hi) < w1) hi = 2.0 * hi + h;
                double lo = 0.0;
                for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (w0(mid) >= w1 ? hi : lo) = mid;
                }
                cut = hi;
            }
            sol.thresholds.set_alpha(k, j, cut * cut);

            v.base = geo + w1;
            if (std::isinf(cut)) {
                v.base = geo + w0(0.0);  // a = 0: the stay value does not depend on e
            } else if (cut > 0.0) {
                const double nodes = std::ceil(cut / h) + 1.0;
                int m = nodes > kMaxHalf ? kMaxHalf : static_cast<int>(nodes);
                if (nodes > kMaxHalf) {
                    m = kMaxHalf;
                    v.h = cut / (kMaxHalf - 1);
                }
                v.phi.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
                for (int i = -m; i <= m; ++i) {
                    const double e = i * v.h;
                    v.phi[static_cast<std::size_t>(i + m)] = std::min(0.0, w0(e) - w1);
                }
            }
        }
        next = std::move(cur);
    }

    const ValueRep& start = next[static_cast<std::size_t>(Q)];
    double v0 = start.base;
    if (start.quadratic) {
        v0 = start.base;
    } else if (!start.phi.empty()) {
        v0 += start.phi[start.phi.size() / 2];
    }
    const double s2 = noise.sigma * noise.sigma;
    sol.value = (v0 + initial_error_cost(p, 1.0)) * s2;
    return sol;
}

BellmanSolution solve_bellman(const SystemParams& p, const DiscreteNoise& noise) {
    validate_params(p);
    const int K = effective_horizon(p);
    const int Q = initial_budget(p);
    const double var = noise.variance();
    const double geo = geo_tau(p.a, p.tau) * var;
    const double a2tau = ipow(p.a, 2 * p.tau);

    // Memo keyed on (k, j, e rounded to 1e-12); the reachable e form a finite set.
    std::map<std::tuple<int, int, long long>, double> memo;
    std::vector<double> fire_min(static_cast<std::size_t>(K) * (Q + 1), kInf);
    auto key = [](double e) { return std::llround(e * 1e12); };

    auto value = [&](auto&& self, int k, int j, double e) -> double {
        if (k >= K) return 0.0;
        const auto id = std::make_tuple(k, j, key(e));
        if (auto it = memo.find(id); it != memo.end()) return it->second;
        double stay = a2tau * e * e;
        for (std::size_t i = 0; i < noise.values.size(); ++i)
            stay += noise.probs[i] * self(self, k + 1, j, p.a * e + noise.values[i]);
        double best = stay;
        if (j > 0) {
            double sw = 0.0;
            for (std::size_t i = 0; i < noise.values.size(); ++i)
                sw += noise.probs[i] * self(self, k + 1, j - 1, noise.values[i]);
            if (sw <= stay) {
                best = sw;
                double& fm = fire_min[static_cast<std::size_t>(k) * (Q + 1) + j];
                fm = std::min(fm, e * e);
            }
        }
        const double v = geo + best;
        memo.emplace(id, v);
        return v;
    };

    BellmanSolution sol;
    sol.value = value(value, 0, Q, 0.0) + initial_error_cost(p, var);
    sol.thresholds = ThresholdTable(K, Q, std::sqrt(var));
    const double unit = var > 0.0 ? var : 1.0;
    for (int k = 0; k < K; ++k)
        for (int j = 0; j <= Q; ++j) {
            const double fm = fire_min[static_cast<std::size_t>(k) * (Q + 1) + j];
            sol.thresholds.set_alpha(k, j, j == 0 ? kInf : fm / unit);
        }
    return sol;
}

}  // namespace swlqr
