#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/kernels.hpp"

namespace swlqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Half-width of the silent interval for threshold α in units of `unit` = σ².
double half_width(double alpha, double unit) { return std::isinf(alpha) ? kInf : std::sqrt(alpha * unit); }

void fill_boundary(DpTables& t, int k) {
    const int K = t.effective_horizon;
    const double a2tau = ipow(t.params.a, 2 * t.params.tau);
    for (int j = 0; j <= t.q0; ++j) {
        DpCell& cell = t.at(k, j);
        if (j == 0) {
            const DpCell next = k + 1 < K ? t.at(k + 1, 0) : DpCell{};
            // Open loop: the carried error grows by a² and picks up one σ² per stage.
            cell.s = a2tau + t.params.a * t.params.a * next.s;
            cell.c0 = t.geo + next.s + next.c0;
            cell.z0 = 0.0;
            cell.c1 = kNaN;
            cell.z1 = kNaN;
            cell.alpha = kInf;
        } else if (j >= K - k) {
            // Enough budget to switch at every remaining effective stage.
            cell.s = a2tau;
            cell.c0 = cell.c1 = (K - k) * t.geo;
            cell.z0 = cell.z1 = 0.0;
            cell.alpha = 0.0;
        }
    }
}

DpTables empty_tables(const SystemParams& p) {
    validate_params(p);
    DpTables t;
    t.params = p;
    t.effective_horizon = effective_horizon(p);
    t.q0 = initial_budget(p);
    t.geo = geo_tau(p.a, p.tau);
    t.sigma_w = p.sigma_w;
    const DpCell nan_cell{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    t.cells.assign(static_cast<std::size_t>(t.effective_horizon) * (t.q0 + 1), nan_cell);
    return t;
}

template <class Measure, class Noise>
class Solver {
public:
    Solver(const SystemParams& p, const Noise& noise, double unit, const DpOptions& opt)
        : t_(empty_tables(p)), noise_(noise), unit_(unit), opt_(opt) {
        K_ = t_.effective_horizon;
        Q_ = t_.q0;
        a_ = p.a;
        a2tau_ = ipow(p.a, 2 * p.tau);
        variance_ = noise.variance();
        noise_law_ = Measure::noise_law(noise, opt.grid_points);
        nu_.assign(t_.cells.size(), Measure{});
        for (int k = K_ - 1; k >= 0; --k) fill_boundary(t_, k);
        for (int k = 0; k < K_; ++k)
            for (int j = 1; j <= Q_; ++j)
                if (interior(k, j)) t_.at(k, j).alpha = 1.0;
    }

    DpTables run() {
        double best = kInf;
        int stalled = 0;
        for (int outer = 1; outer <= opt_.max_outer; ++outer) {
            forward();
            const double change = backward();
            t_.outer_iterations = outer;
            t_.outer_residual = change;
            if (change < opt_.outer_tol) return finish();
            // On a grid the sweep can lock into a cycle. A small one is accepted; a large one
            // (a cell flipping between two branches) is damped by halving the relaxation.
            stalled = change > 0.9 * best ? stalled + 1 : 0;
            best = std::min(best, change);
            if (stalled >= 5 && change < opt_.stall_tol) return finish();
            if (stalled >= 5 && relax_ > kMinRelax) {
                relax_ *= 0.5;
                stalled = 0;
                best = kInf;
            }
        }
        throw NumericalError(ErrorCode::FixedPointDivergence,
                             "threshold sweep did not settle in " + std::to_string(opt_.max_outer) + " passes");
    }

private:
    bool interior(int k, int j) const { return j >= 1 && j < K_ - k; }
    Measure& nu(int k, int j) { return nu_[static_cast<std::size_t>(k) * (Q_ + 1) + j]; }

    // Law of S at every cell under the current thresholds, jointly with reaching the cell.
    void forward() {
        for (auto& m : nu_) m = Measure{};
        nu(0, Q_) = Measure::point(0.0);
        for (int k = 0; k + 1 < K_; ++k) {
            std::vector<Measure> stay(Q_ + 1);
            std::vector<double> fired(Q_ + 1, 0.0);
            for (int j = 0; j <= Q_; ++j) {
                const Measure& m = nu(k, j);
                if (m.empty()) continue;
                const double c = half_width(t_.at(k, j).alpha, unit_);
                stay[j] = std::isinf(c) ? m : m.restricted(-c, c);
                if (j > 0) fired[j] = std::max(0.0, m.mass() - stay[j].mass());
            }
            for (int j = 0; j <= Q_; ++j) {
                Measure pre = stay[j];
                const double incoming = j < Q_ ? fired[j + 1] : 0.0;
                if (incoming > 0.0) pre.add_atom(0.0, incoming);
                if (pre.empty() || pre.mass() <= 0.0) continue;
                Measure next = pre.pushed(a_, noise_, opt_.grid_points);
                t_.max_evenness_defect = std::max(t_.max_evenness_defect, next.evenness_defect());
                nu(k + 1, j) = std::move(next);
            }
        }
    }

    // One backward sweep; returns the largest change between a cell's solved threshold
    // and the one it entered with.
    double backward() {
        double change = 0.0;
        for (int k = K_ - 1; k >= 0; --k) {
            fill_boundary(t_, k);
            for (int j = 1; j <= Q_; ++j) {
                if (!interior(k, j)) continue;
                const double before = t_.at(k, j).alpha;
                solve_cell(k, j);
                const double solved = t_.at(k, j).alpha;
                change = std::max(change, std::fabs(solved - before));
                if (relax_ < 1.0 && std::isfinite(before)) relax_cell(k, j, before + relax_ * (solved - before));
            }
        }
        return change;
    }

    void solve_cell(int k, int j) {
        DpCell& cell = t_.at(k, j);
        const DpCell& n1 = t_.at(k + 1, j - 1);  // switch: one unit spent, S restarts at W

        if (j - 1 == 0) {
            // The next gate cannot fire, so E[W²] is deterministic and is booked into c.
            cell.c1 = t_.geo + n1.c0 + n1.s * variance_ / unit_;
            cell.z1 = n1.z0;
        } else {
            const double c = half_width(n1.alpha, unit_);
            const double p10 = noise_.prob(-c, c);
            const double m2 = noise_.partial_second_moment(-c, c);
            cell.c1 = t_.geo + p10 * n1.c0 + (1.0 - p10) * n1.c1;
            cell.z1 = p10 * n1.z0 + n1.s * m2 + (1.0 - p10) * n1.z1;
        }

        prepare_gate(k, j);
        double alpha = cell.alpha;
        for (int it = 0; it < opt_.max_inner; ++it) {
            const double next = evaluate(k, j, alpha);
            const bool settled = std::fabs(next - alpha) < opt_.tol;
            alpha = next;
            if (settled) {
                cell.alpha = alpha;
                return;
            }
        }
        throw NumericalError(ErrorCode::FixedPointDivergence,
                             "threshold at k = " + std::to_string(k) + ", j = " + std::to_string(j) + " did not settle");
    }

    // Conditional law of S entering (k, j): the reached measure blended with the "just switched"
    // law at weight kFallbackMass. Unreachable cells fall back smoothly; under compact-support
    // noise a hard switch at zero mass makes the outer sweep flip between two branches.
    struct Gate {
        const Measure* reached = nullptr;
        GateTables reached_tables;
        GateTables fallback_tables;
        double p_from_zero = 0.0;
        double w2_from_zero = 0.0;
    };
    static constexpr double kFallbackMass = 1e-12;

    void prepare_gate(int k, int j) {
        const Measure& reached = nu(k, j);
        const double c_next = half_width(t_.at(k + 1, j).alpha, unit_);
        gate_.reached = (reached.empty() || reached.mass() <= 0.0) ? nullptr : &reached;
        if (gate_.reached) gate_.reached_tables = gate_tables(reached, a_, noise_, -c_next, c_next);
        gate_.fallback_tables = gate_tables(noise_law_, a_, noise_, -c_next, c_next);
        gate_.p_from_zero = noise_.prob(-c_next, c_next);
        gate_.w2_from_zero = noise_.partial_second_moment(-c_next, c_next);
    }

    // Σ w·1{silent} and the gate sums over one measure, scaled by `weight`.
    void accumulate(const Measure& m, const GateTables& g, double c, double weight, double& mass, double& pass,
                    double& w2) {
        const auto frac = m.fractions(-c, c);
        w_.resize(m.size());
        double ms = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) {
            w_[i] = m.weights()[i] * frac[i];
            ms += w_[i];
        }
        mass += weight * ms;
        pass += weight * kernels::dot(w_.data(), g.pass.data(), w_.size());
        w2 += weight * kernels::dot(w_.data(), g.w2.data(), w_.size());
    }

    // Silent-branch coefficients of (k, j) at threshold α; returns the threshold they imply.
    double evaluate(int k, int j, double alpha) {
        DpCell& cell = t_.at(k, j);
        const DpCell& n0 = t_.at(k + 1, j);
        const double c = half_width(alpha, unit_);
        double mass = 0.0, pass = 0.0, w2 = 0.0;
        if (gate_.reached) accumulate(*gate_.reached, gate_.reached_tables, c, 1.0, mass, pass, w2);
        accumulate(noise_law_, gate_.fallback_tables, c, gate_.reached ? kFallbackMass : 1.0, mass, pass, w2);
        double p00, q00;  // Pr(silent next | silent now), E[W²; silent next | silent now]
        if (mass > 0.0) {
            p00 = pass / mass;
            q00 = w2 / mass;
        } else {
            // Empty silent set: the limit α → 0 concentrates S at 0.
            p00 = gate_.p_from_zero;
            q00 = gate_.w2_from_zero;
        }
        cell.s = a2tau_ + a_ * a_ * p00 * n0.s;
        cell.c0 = t_.geo + p00 * n0.c0 + (1.0 - p00) * n0.c1;
        cell.z0 = p00 * n0.z0 + n0.s * q00 + (1.0 - p00) * n0.z1;
        return std::max(0.0, ((cell.c1 - cell.c0) + (cell.z1 - cell.z0) / unit_) / cell.s);
    }

    // Moves (k, j) to threshold α and recomputes its silent-branch coefficients there.
    void relax_cell(int k, int j, double alpha) {
        evaluate(k, j, alpha);
        t_.at(k, j).alpha = alpha;
    }

    DpTables finish() {
        const DpCell& start = t_.at(0, Q_);
        double v = start.c0 * unit_ + start.z0;
        if (Q_ > 0) v = std::min(v, start.c1 * unit_ + start.z1);
        t_.value = v + initial_error_cost(t_.params, variance_);
        return std::move(t_);
    }

    DpTables t_;
    const Noise& noise_;
    double unit_;
    DpOptions opt_;
    int K_ = 0, Q_ = 0;
    double a_ = 0.0, a2tau_ = 0.0, variance_ = 0.0;
    Measure noise_law_;
    std::vector<Measure> nu_;
    Gate gate_;
    std::vector<double> w_;
    double relax_ = 1.0;  // outer under-relaxation, halved while the sweep cycles
    static constexpr double kMinRelax = 1.0 / 64.0;
};

}  // namespace

double geo_tau(double a, int tau) {
    double s = 0.0;
    for (int j = 0; j < tau; ++j) s += ipow(a, 2 * (tau - 1 - j));
    return s;
}

double initial_error_cost(const SystemParams& p, double variance) {
    double s = 0.0;
    for (int k = 1; k < p.tau; ++k) s += geo_tau(p.a, k);
    return s * variance;
}

ThresholdTable DpTables::thresholds() const {
    ThresholdTable t(effective_horizon, q0, sigma_w);
    for (int k = 0; k < effective_horizon; ++k)
        for (int j = 0; j <= q0; ++j) {
            const double a = at(k, j).alpha;
            if (!std::isnan(a)) t.set_alpha(k, j, a);
        }
    return t;
}

DpTables boundary_tables(const SystemParams& p) {
    DpTables t = empty_tables(p);
    for (int k = t.effective_horizon - 1; k >= 0; --k) fill_boundary(t, k);
    t.value = kNaN;
    return t;
}

DpTables solve_dp(const SystemParams& p, const NoiseModel& noise, const DpOptions& opt) {
    // Every continuous law here is a scale family, so α does not depend on σ: solve at σ = 1.
    const NoiseModel unit_noise{noise.kind, 1.0};
    DpTables t = Solver<GridMeasure, NoiseModel>(p, unit_noise, 1.0, opt).run();
    const double s2 = noise.sigma * noise.sigma;
    for (DpCell& c : t.cells) {
        c.z0 *= s2;
        c.z1 *= s2;
    }
    t.value *= s2;
    t.sigma_w = noise.sigma;
    return t;
}

DpTables solve_dp(const SystemParams& p, const DiscreteNoise& noise, const DpOptions& opt) {
    const double var = noise.variance();
    DpTables t = Solver<AtomMeasure, DiscreteNoise>(p, noise, var > 0.0 ? var : 1.0, opt).run();
    t.sigma_w = std::sqrt(var);
    if (var == 0.0) t.value = 0.0;  // the solve ran in unit variance; a point law has no error at all
    return t;
}

SmPropagation propagate_sm_density(const TruncatedSmDensity& d, const NoiseModel& noise, double a, double theta,
                                   double theta_next, int grid_points) {
    const double total = d.density.mass();
    const double c = std::isinf(theta) ? kInf : std::sqrt(theta);
    const GridMeasure kept = std::isinf(c) ? d.density : d.density.restricted(-c, c);
    const double survival = total > 0.0 ? kept.mass() / total : 0.0;
    if (!(survival >= 1e-12))
        throw NumericalError(ErrorCode::MassUnderflow, "silent set holds less than 1e-12 of the mass");

    const double c_next = std::isinf(theta_next) ? kInf : std::sqrt(theta_next);
    const GateTables gate = gate_tables(kept, a, noise, -c_next, c_next);
    const double m = kept.mass();
    const double pass = kernels::dot(kept.weights().data(), gate.pass.data(), kept.size()) / m;
    const double w2 = kernels::dot(kept.weights().data(), gate.w2.data(), kept.size()) / m;

    SmPropagation out;
    out.next.density = kept.pushed(a, noise, grid_points);
    out.next.density.scale(1.0 / out.next.density.mass());
    out.next.survival_prob = d.survival_prob * survival;
    out.p_no_switch = pass;
    out.w2_cond = pass > 0.0 ? w2 / pass : 0.0;
    return out;
}

}  // namespace swlqr
