#pragma once

#include <vector>

#include "swlqr/core.hpp"

namespace swlqr {

struct RiccatiSolution {
    std::vector<double> p_seq;     // P_0..P_N, P_N = q
    std::vector<double> gain_seq;  // L_0..L_{N-1}, L_k = abP_{k+1}/(r + b²P_{k+1})
    double p_ss = 0.0;             // +inf when the steady iteration diverges
    double gain_ss = 0.0;
};

struct SteadyRiccati {
    double P = 0.0;
    double L = 0.0;
    int iterations = 0;
};

// One backward step P ↦ q + a²P − (abP)²/(r + b²P).
double riccati_map(const SystemParams& p, double P);
double riccati_gain(const SystemParams& p, double P);

RiccatiSolution riccati_finite(const SystemParams& p);

// Iterates from P = q until |ΔP| < tol; NumericalError(NonConvergence) after max_iter.
SteadyRiccati riccati_steady(const SystemParams& p, double tol = 1e-12, int max_iter = 100000);

// Weight of the mean squared estimation error in the reformulated cost: L²(r + b²P) = L·abP.
double error_weight(const SystemParams& p);

// Per-step P1 cost written through the estimation error under U = −L X̂:
// P₀/N · E[X₀²] + L²(r + b²P) · E[ε²] + P σ².
double equivalent_cost(const SystemParams& p, double err_sq_mean, double x0_sq_mean);

}  // namespace swlqr
