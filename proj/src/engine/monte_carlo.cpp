#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "swlqr/engine.hpp"
#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

// Runs body(i) for i in [0, n) on a small worker pool. Results go to pre-allocated
// slots, so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

double ci95(const MeanSe& m) { return 1.96 * m.se; }

}  // namespace

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    out.n = static_cast<int>(xs.size());
    if (xs.empty()) return out;
    double s = 0.0;
    for (double x : xs) s += x;
    out.mean = s / out.n;
    if (out.n < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (out.n - 1) / out.n);
    return out;
}

RunStats run_mc(const BoundPolicy& policy, const MonteCarloConfig& cfg) {
    if (cfg.runs < 1) throw ValidationError(ErrorCode::InvalidArgument, "runs must be at least 1");
    const SystemParams& p = policy.params();
    const int n = p.horizon;
    std::vector<RunRecord> records(static_cast<std::size_t>(cfg.runs));
    parallel_for(cfg.runs, cfg.threads, [&](int i) {
        records[static_cast<std::size_t>(i)] =
            simulate_run(policy, sub_seed(cfg.seed, static_cast<std::uint64_t>(i)), cfg.divergence);
    });

    RunStats st;
    st.policy = policy.spec().label;
    st.runs = cfg.runs;
    st.stage_cost.assign(static_cast<std::size_t>(n), 0.0);
    st.running_avg.assign(static_cast<std::size_t>(n), 0.0);
    st.running_avg_ci.assign(static_cast<std::size_t>(n), 0.0);
    st.rate.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<const RunRecord*> ok;
    double rate_sum = 0.0;
    for (const auto& r : records) {
        if (r.diverged)
            ++st.diverged_runs;
        else
            ok.push_back(&r);
        rate_sum += static_cast<double>(r.switches) / n;
        int cum = 0;
        for (int k = 0; k < n; ++k) {
            cum += r.decisions[static_cast<std::size_t>(k)];
            st.rate[static_cast<std::size_t>(k)] += static_cast<double>(cum) / (k + 1) / cfg.runs;
        }
    }
    st.diverged_fraction = static_cast<double>(st.diverged_runs) / cfg.runs;
    st.switch_rate = rate_sum / cfg.runs;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (ok.empty()) {
        std::fill(st.stage_cost.begin(), st.stage_cost.end(), nan);
        std::fill(st.running_avg.begin(), st.running_avg.end(), nan);
        std::fill(st.running_avg_ci.begin(), st.running_avg_ci.end(), nan);
        st.steady_cost = std::numeric_limits<double>::infinity();
        st.total_cost = st.err_sq = st.gap_sq = nan;
        if (cfg.keep_runs) st.records = std::move(records);
        return st;
    }

    std::vector<double> col(ok.size()), run_avg(ok.size(), 0.0);
    for (int k = 0; k < n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < ok.size(); ++i) {
            run_avg[i] += ok[i]->stage_costs[kk];
            col[i] = run_avg[i] / (k + 1);
        }
        const MeanSe ra = mean_se(col);
        st.running_avg[kk] = ra.mean;
        st.running_avg_ci[kk] = ci95(ra);
        double sc = 0.0;
        for (const auto* r : ok) sc += r->stage_costs[kk];
        st.stage_cost[kk] = sc / static_cast<double>(ok.size());
    }

    std::vector<double> steady, total, err, gap;
    for (const auto* r : ok) {
        steady.push_back(r->steady_cost(cfg.steady_window));
        double c = 0.0, e = 0.0, g = 0.0;
        for (int k = 0; k < n; ++k) {
            c += r->stage_costs[static_cast<std::size_t>(k)];
            e += r->err_sq[static_cast<std::size_t>(k)];
            g += r->gap_sq[static_cast<std::size_t>(k)];
        }
        total.push_back((c + p.q * r->terminal_x * r->terminal_x) / n);
        err.push_back(e / n);
        gap.push_back(g / n);
    }
    const MeanSe s = mean_se(steady);
    st.steady_cost = s.mean;
    st.ci95 = ci95(s);
    const MeanSe t = mean_se(total), e = mean_se(err), g = mean_se(gap);
    st.total_cost = t.mean;
    st.total_cost_se = t.se;
    st.err_sq = e.mean;
    st.err_sq_se = e.se;
    st.gap_sq = g.mean;
    st.gap_sq_se = g.se;
    if (cfg.keep_runs) st.records = std::move(records);
    return st;
}

SymmetryDiagnostic symmetry_diagnostic(const BoundPolicy& policy, int runs, std::uint64_t seed, int threads) {
    if (runs < 2) throw ValidationError(ErrorCode::InvalidArgument, "symmetry diagnostic needs at least 2 runs");
    const SystemParams& p = policy.params();
    const int K = effective_horizon(p);
    const double scale = p.sigma_w > 0.0 ? p.sigma_w : 1.0;

    // Per run and per m: Σ sign(ξ) S / σ and the count.
    struct Acc {
        std::map<int, std::pair<double, int>> by_m;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(runs));
    parallel_for(runs, threads, [&](int i) {
        const std::uint64_t s = sub_seed(seed, static_cast<std::uint64_t>(i));
        Rng noise_rng = make_rng(s, 0);
        Rng policy_rng = make_rng(s, 1);
        LoopState ls = policy.init();
        Acc& a = acc[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k) {
            const StepRecord rec = policy.step(ls, noise_rng, policy_rng);
            if (rec.decision == 0 && !rec.forced && rec.m >= 1) {
                const double xi = rec.x - rec.s_m;
                const double sgn = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
                auto& cell = a.by_m[rec.m];
                cell.first += sgn * rec.s_m / scale;
                cell.second += 1;
            }
        }
    });

    SymmetryDiagnostic out;
    std::map<int, std::vector<double>> per_bin;
    std::vector<double> pooled;
    for (const auto& a : acc) {
        double sum = 0.0;
        int cnt = 0;
        for (const auto& [m, cell] : a.by_m) {
            per_bin[m].push_back(cell.first / cell.second);
            sum += cell.first;
            cnt += cell.second;
        }
        out.samples += cnt;
        if (cnt > 0) pooled.push_back(sum / cnt);
    }
    for (const auto& [m, xs] : per_bin) {
        const MeanSe ms = mean_se(xs);
        out.bins.push_back({m, ms.mean, ms.se, ms.n});
    }
    const MeanSe pm = mean_se(pooled);
    out.pooled_mean = pm.mean;
    out.pooled_se = pm.se;
    out.z = pm.se > 0.0 ? pm.mean / pm.se : 0.0;
    return out;
}

}  // namespace swlqr
