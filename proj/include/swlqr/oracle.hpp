#pragma once

#include <vector>

#include "swlqr/core.hpp"
#include "swlqr/measure.hpp"

namespace swlqr {

struct OracleOptions {
    double max_policies = 5e6;  // ExplosionGuard above this many budget-feasible policies
};

// One deterministic history-feedback policy: a decision for every switch-history
// node at k < N − τ, nodes in breadth-first order (root = empty history).
struct EnumeratedPolicy {
    std::vector<int> decisions;
    double cost = 0.0;       // Σ_{k<N} E[ε_k²] with the controller's exact conditional mean
    bool symmetric = false;  // E[X_k | controller info] ignores silence at every k
    bool threshold = false;  // within each (k, Q_k): silent iff S² below a cut
    // Per stage k: smallest S² that fires at budget j (index k * (q0 + 1) + j), +inf if none.
    std::vector<double> fire_cut;
};

struct OracleReport {
    double policies = 0;
    double unrestricted_min = 0.0;
    double symmetric_min = 0.0;
    double threshold_min = 0.0;
    double bellman_value = 0.0;  // exact DP over (k, Q_k, S)
    double tree_value = 0.0;     // the same DP expanded over the history tree
    double max_evenness_defect = 0.0;  // max |V(h) − V(−h)| over tree nodes
    std::vector<EnumeratedPolicy> minimizers;  // all policies within 1e-9 of the minimum
    bool threshold_attains_min = false;
    int q0 = 0;
    int effective_horizon = 0;
};

// Number of budget-feasible deterministic policies, by a recursion over the tree.
double count_policies(const SystemParams& p, const DiscreteNoise& noise);

// Exhaustive check of the switching problem on a small instance.
// Throws ValidationError(ExplosionGuard) when the policy count exceeds the limit.
OracleReport oracle_enumerate(const SystemParams& p, const DiscreteNoise& noise, const OracleOptions& opt = {});

}  // namespace swlqr
