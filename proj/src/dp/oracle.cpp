#include "swlqr/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long long round_key(double x) { return std::llround(x * 1e12); }

// Switch-history tree: level k holds the n^k prefixes (W_0..W_{k-1}), BFS-numbered.
struct Tree {
    int n = 0;       // support size
    int levels = 0;  // histories have N − 1 draws
    std::vector<long long> offset;
    std::vector<long long> width;

    Tree(int support, int draws) : n(support), levels(draws) {
        long long off = 0, w = 1;
        for (int k = 0; k <= draws; ++k) {
            offset.push_back(off);
            width.push_back(w);
            off += w;
            w *= n;
        }
    }
    long long node(int k, long long prefix) const { return offset[k] + prefix; }
};

struct History {
    double prob = 1.0;
    std::vector<double> w;   // W_0..W_{N-2}
    std::vector<double> xn;  // noise part of X_0..X_{N-1}
    std::vector<long long> prefix;  // prefix id at each level 0..N-1
};

class Enumerator {
public:
    Enumerator(const SystemParams& p, const DiscreteNoise& noise)
        : p_(p), noise_(noise), tree_(static_cast<int>(noise.values.size()), p.horizon - 1) {
        K_ = effective_horizon(p);
        Q_ = initial_budget(p);
        const int draws = p.horizon - 1;
        const long long total = tree_.width[static_cast<std::size_t>(draws)];
        for (long long id = 0; id < total; ++id) {
            History h;
            long long rest = id;
            std::vector<int> digits(static_cast<std::size_t>(draws));
            for (int i = draws - 1; i >= 0; --i) {
                digits[static_cast<std::size_t>(i)] = static_cast<int>(rest % tree_.n);
                rest /= tree_.n;
            }
            h.xn.assign(static_cast<std::size_t>(p.horizon), 0.0);
            h.prefix.assign(static_cast<std::size_t>(p.horizon), 0);
            long long pre = 0;
            for (int i = 0; i < draws; ++i) {
                const int d = digits[static_cast<std::size_t>(i)];
                h.prob *= noise.probs[static_cast<std::size_t>(d)];
                h.w.push_back(noise.values[static_cast<std::size_t>(d)]);
                h.xn[static_cast<std::size_t>(i + 1)] = p.a * h.xn[static_cast<std::size_t>(i)] + h.w.back();
                pre = pre * tree_.n + d;
                h.prefix[static_cast<std::size_t>(i + 1)] = pre;
            }
            if (h.prob > 0.0) hist_.push_back(std::move(h));
        }
        decision_nodes_ = K_ > 0 ? tree_.offset[static_cast<std::size_t>(K_)] : 0;
        parent_.assign(static_cast<std::size_t>(decision_nodes_), -1);
        for (int k = 1; k < K_; ++k)
            for (long long pre = 0; pre < tree_.width[static_cast<std::size_t>(k)]; ++pre)
                parent_[static_cast<std::size_t>(tree_.node(k, pre))] = tree_.node(k - 1, pre / tree_.n);
    }

    double count() const { return count_rec(0, 0, Q_); }

    OracleReport run(const OracleOptions& opt) {
        OracleReport rep;
        rep.q0 = Q_;
        rep.effective_horizon = K_;
        rep.policies = count();
        if (rep.policies > opt.max_policies)
            throw ValidationError(ErrorCode::ExplosionGuard,
                                  "instance has " + std::to_string(rep.policies) + " policies, above the limit");
        rep.unrestricted_min = rep.symmetric_min = rep.threshold_min = kInf;
        bits_.assign(static_cast<std::size_t>(decision_nodes_), 0);
        remaining_.assign(static_cast<std::size_t>(decision_nodes_), 0);
        rep_ = &rep;
        assign(0);
        for (const auto& pol : rep.minimizers)
            if (pol.threshold) rep.threshold_attains_min = true;

        rep.bellman_value = solve_bellman(p_, noise_).value;
        tree_dp(rep);
        return rep;
    }

private:
    double count_rec(int k, long long pre, int budget) const {
        if (k >= K_) return 1.0;
        double silent = 1.0, fire = budget > 0 ? 1.0 : 0.0;
        for (int d = 0; d < tree_.n; ++d) {
            const long long child = pre * tree_.n + d;
            silent *= count_rec(k + 1, child, budget);
            if (budget > 0) fire *= count_rec(k + 1, child, budget - 1);
        }
        return silent + fire;
    }

    void assign(long long idx) {
        if (idx == decision_nodes_) {
            record(evaluate());
            return;
        }
        const long long par = parent_[static_cast<std::size_t>(idx)];
        const int left = par < 0 ? Q_ : remaining_[static_cast<std::size_t>(par)] - bits_[static_cast<std::size_t>(par)];
        remaining_[static_cast<std::size_t>(idx)] = left;
        for (int b = 0; b <= (left > 0 ? 1 : 0); ++b) {
            bits_[static_cast<std::size_t>(idx)] = b;
            assign(idx + 1);
        }
        bits_[static_cast<std::size_t>(idx)] = 0;
    }

    // Streams policies: running minima plus every policy within 1e-9 of the best so far.
    void record(EnumeratedPolicy pol) {
        OracleReport& rep = *rep_;
        if (pol.symmetric) rep.symmetric_min = std::min(rep.symmetric_min, pol.cost);
        if (pol.threshold) rep.threshold_min = std::min(rep.threshold_min, pol.cost);
        if (pol.cost < rep.unrestricted_min) {
            rep.unrestricted_min = pol.cost;
            std::erase_if(rep.minimizers, [&](const EnumeratedPolicy& m) { return m.cost > pol.cost + 1e-9; });
        }
        if (pol.cost <= rep.unrestricted_min + 1e-9) rep.minimizers.push_back(std::move(pol));
    }

    EnumeratedPolicy evaluate() const {
        const int N = p_.horizon;
        EnumeratedPolicy pol;
        pol.decisions = bits_;
        pol.fire_cut.assign(static_cast<std::size_t>(K_) * (Q_ + 1), kInf);
        std::vector<double> silent_max(pol.fire_cut.size(), -kInf);

        const std::size_t H = hist_.size();
        std::vector<std::vector<int>> dec(H, std::vector<int>(static_cast<std::size_t>(N), 0));
        for (std::size_t h = 0; h < H; ++h) {
            const History& hi = hist_[h];
            double s = 0.0;
            for (int k = 0; k < N; ++k) {
                int d = 0;
                if (k < K_) {
                    const long long node = tree_.node(k, hi.prefix[static_cast<std::size_t>(k)]);
                    d = bits_[static_cast<std::size_t>(node)];
                    const int j = remaining_[static_cast<std::size_t>(node)];
                    const std::size_t cell = static_cast<std::size_t>(k) * (Q_ + 1) + j;
                    if (d) pol.fire_cut[cell] = std::min(pol.fire_cut[cell], s * s);
                    else silent_max[cell] = std::max(silent_max[cell], s * s);
                }
                dec[h][static_cast<std::size_t>(k)] = d;
                if (k + 1 < N) s = (d ? 0.0 : p_.a * s) + hi.w[static_cast<std::size_t>(k)];
            }
        }
        pol.threshold = true;
        for (std::size_t c = 0; c < pol.fire_cut.size(); ++c)
            if (!(silent_max[c] < pol.fire_cut[c] - 1e-12) && silent_max[c] > -kInf && pol.fire_cut[c] < kInf)
                pol.threshold = false;

        // Controller information at t: (D_i, D_i X_i) for i ≤ t − τ. Cells refine over time.
        std::vector<int> cell(H, 0);
        std::vector<int> last(H, -1);  // most recent revealed switch time
        pol.symmetric = true;
        double cost = 0.0;
        for (int t = 0; t < N; ++t) {
            const int i = t - p_.tau;
            if (i >= 0) {
                std::map<std::tuple<int, int, long long>, int> ids;
                for (std::size_t h = 0; h < H; ++h) {
                    const int d = dec[h][static_cast<std::size_t>(i)];
                    const double x = d ? hist_[h].xn[static_cast<std::size_t>(i)] : 0.0;
                    const auto key = std::make_tuple(cell[h], d, round_key(x));
                    auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
                    cell[h] = it->second;
                    if (d) last[h] = i;
                }
            }
            std::map<int, std::array<double, 3>> acc;
            for (std::size_t h = 0; h < H; ++h) {
                const double x = hist_[h].xn[static_cast<std::size_t>(t)];
                auto& m = acc[cell[h]];
                m[0] += hist_[h].prob;
                m[1] += hist_[h].prob * x;
                m[2] += hist_[h].prob * x * x;
            }
            for (const auto& [id, m] : acc) cost += std::max(0.0, m[2] - m[1] * m[1] / m[0]);
            // Symmetric: the conditional mean is the silence-blind prediction a^{t−i*} X_{i*}.
            for (std::size_t h = 0; h < H && pol.symmetric; ++h) {
                const auto& m = acc[cell[h]];
                const double pred = last[h] < 0 ? 0.0 : ipow(p_.a, t - last[h]) * hist_[h].xn[static_cast<std::size_t>(last[h])];
                if (std::fabs(m[1] / m[0] - pred) > 1e-9 * (1.0 + std::fabs(pred))) pol.symmetric = false;
            }
        }
        pol.cost = cost;
        return pol;
    }

    // Bellman recursion on the history tree, with e = S computed from the history.
    void tree_dp(OracleReport& rep) {
        const double var = noise_.variance();
        const double geo = geo_tau(p_.a, p_.tau) * var;
        const double a2tau = ipow(p_.a, 2 * p_.tau);
        std::map<std::tuple<int, long long, int, int>, double> memo;

        auto s_of = [&](int k, long long pre, int since) {
            std::vector<double> w(static_cast<std::size_t>(k));
            for (int i = k - 1; i >= 0; --i) {
                w[static_cast<std::size_t>(i)] = noise_.values[static_cast<std::size_t>(pre % tree_.n)];
                pre /= tree_.n;
            }
            double s = 0.0;
            for (int i = since; i < k; ++i) s = p_.a * s + w[static_cast<std::size_t>(i)];
            return s;
        };
        auto value = [&](auto&& self, int k, long long pre, int j, int since) -> double {
            if (k >= K_) return 0.0;
            const auto key = std::make_tuple(k, pre, j, since);
            if (auto it = memo.find(key); it != memo.end()) return it->second;
            const double e = s_of(k, pre, since);
            double stay = a2tau * e * e, sw = 0.0;
            for (int d = 0; d < tree_.n; ++d) {
                const double pr = noise_.probs[static_cast<std::size_t>(d)];
                stay += pr * self(self, k + 1, pre * tree_.n + d, j, since);
                if (j > 0) sw += pr * self(self, k + 1, pre * tree_.n + d, j - 1, k);
            }
            const double v = geo + (j > 0 ? std::min(stay, sw) : stay);
            memo.emplace(key, v);
            return v;
        };
        rep.tree_value = value(value, 0, 0, Q_, 0) + initial_error_cost(p_, var);

        // Mirror of a prefix: every draw replaced by the index of its negation.
        std::vector<int> neg(static_cast<std::size_t>(tree_.n));
        for (int d = 0; d < tree_.n; ++d) {
            neg[static_cast<std::size_t>(d)] = d;
            for (int e = 0; e < tree_.n; ++e)
                if (std::fabs(noise_.values[static_cast<std::size_t>(e)] + noise_.values[static_cast<std::size_t>(d)]) <= 1e-12)
                    neg[static_cast<std::size_t>(d)] = e;
        }
        double worst = 0.0;
        for (const auto& [key, v] : memo) {
            const auto [k, pre, j, since] = key;
            long long mirror = 0, rest = pre, scale = 1;
            for (int i = 0; i < k; ++i) {
                mirror += neg[static_cast<std::size_t>(rest % tree_.n)] * scale;
                rest /= tree_.n;
                scale *= tree_.n;
            }
            const double mv = value(value, k, mirror, j, since);
            worst = std::max(worst, std::fabs(v - mv));
        }
        rep.max_evenness_defect = worst;
    }

    const SystemParams& p_;
    const DiscreteNoise& noise_;
    Tree tree_;
    int K_ = 0, Q_ = 0;
    std::vector<History> hist_;
    long long decision_nodes_ = 0;
    std::vector<long long> parent_;
    std::vector<int> bits_;
    std::vector<int> remaining_;
    OracleReport* rep_ = nullptr;
};

}  // namespace

double count_policies(const SystemParams& p, const DiscreteNoise& noise) {
    validate_params(p);
    return Enumerator(p, noise).count();
}

OracleReport oracle_enumerate(const SystemParams& p, const DiscreteNoise& noise, const OracleOptions& opt) {
    validate_params(p);
    return Enumerator(p, noise).run(opt);
}

}  // namespace swlqr
