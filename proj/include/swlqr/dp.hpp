#pragma once

#include <iosfwd>
#include <vector>

#include "swlqr/core.hpp"
#include "swlqr/measure.hpp"
#include "swlqr/noise.hpp"
#include "swlqr/policies.hpp"

namespace swlqr {

// Σ_{j<τ} a^{2(τ-1-j)}: noise that reaches the controller's error before any update can land.
double geo_tau(double a, int tau);

// Coefficients of the two action values at stage k with budget j:
//   V'_{kj0}(e) = s e² + c0 σ² + z0,   V'_{kj1} = c1 σ² + z1,
// and the threshold α with D = 1{S² ≥ α σ²}. j = 0 has α = +inf, c1 = z1 = NaN.
struct DpCell {
    double s = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double z0 = 0.0;
    double z1 = 0.0;
    double alpha = 0.0;
};

struct DpTables {
    SystemParams params;
    int effective_horizon = 0;  // K = N − τ; cells exist for k < K
    int q0 = 0;
    double geo = 0.0;
    double sigma_w = 0.0;
    std::vector<DpCell> cells;  // k-major, (q0 + 1) per stage

    // Expected Σ_{k<N} ε_k² from the initial cell with S = 0, including the
    // k < τ stages no decision can influence.
    double value = 0.0;
    int outer_iterations = 0;
    double outer_residual = 0.0;  // largest threshold change in the last sweep
    double max_evenness_defect = 0.0;  // over every measure built during the solve

    DpCell& at(int k, int j) { return cells[static_cast<std::size_t>(k) * (q0 + 1) + j]; }
    const DpCell& at(int k, int j) const { return cells[static_cast<std::size_t>(k) * (q0 + 1) + j]; }
    ThresholdTable thresholds() const;
};

struct DpOptions {
    int grid_points = 4097;
    double tol = 1e-6;         // per-cell fixed point in α
    double outer_tol = 1e-4;   // largest α change across a whole forward/backward sweep
    double stall_tol = 1e-2;   // accept a sweep that stopped shrinking below this
    int max_inner = 200;
    int max_outer = 200;
};

// Zero-budget row and the always-switch diagonal j ≥ K − k; interior cells are NaN.
DpTables boundary_tables(const SystemParams& p);

// The stage/budget recursion for s, c, z with the threshold law, closed by a
// fixed point in α (per stage inside a forward/backward sweep over the lattice).
// Throws NumericalError(FixedPointDivergence) when the iteration does not settle.
DpTables solve_dp(const SystemParams& p, const NoiseModel& noise, const DpOptions& opt = {});
DpTables solve_dp(const SystemParams& p, const DiscreteNoise& noise, const DpOptions& opt = {});

// Law of S conditioned on every silent gate since the last switch.
struct TruncatedSmDensity {
    GridMeasure density;  // normalized to mass 1
    double survival_prob = 1.0;
};

struct SmPropagation {
    TruncatedSmDensity next;  // law of aS + W given S² < θ
    double p_no_switch = 1.0;  // Pr((aS + W)² < θ_next | S² < θ)
    double w2_cond = 0.0;      // E[W² | S² < θ, (aS + W)² < θ_next]
};

// Throws NumericalError(MassUnderflow) when Pr(S² < θ) < 1e-12.
SmPropagation propagate_sm_density(const TruncatedSmDensity& d, const NoiseModel& noise, double a, double theta,
                                   double theta_next, int grid_points = 4097);

// Exact dynamic program over (k, j, e) for policies of the form D = f(k, Q_k, S):
//   V_k(j, e) = geo σ² + min{a^{2τ} e² + E V_{k+1}(j, a e + W), E V_{k+1}(j − 1, W)}.
struct BellmanOptions {
    double step = 1.0 / 32.0;  // e-grid spacing in units of σ
};

struct BellmanSolution {
    ThresholdTable thresholds;
    double value = 0.0;  // same convention as DpTables::value
};

BellmanSolution solve_bellman(const SystemParams& p, const NoiseModel& noise, const BellmanOptions& opt = {});
BellmanSolution solve_bellman(const SystemParams& p, const DiscreteNoise& noise);

// Σ_{k<τ} E[ε_k²] with X_0 = 0 known.
double initial_error_cost(const SystemParams& p, double variance);

void write_dp_tables(std::ostream& os, const DpTables& t);
// Cells are filled from rows; params and value are not stored in the CSV.
DpTables read_dp_tables(std::istream& is);

}  // namespace swlqr
