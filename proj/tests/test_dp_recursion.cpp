#include <cmath>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "swlqr/csv.hpp"
#include "swlqr/dp.hpp"
#include "swlqr/errors.hpp"

using namespace swlqr;
using Catch::Approx;

namespace {

SystemParams small(int n, double rate, double a = 1.0, int tau = 1) {
    SystemParams p;
    p.horizon = n;
    p.rate = rate;
    p.a = a;
    p.tau = tau;
    return p;
}

DpOptions grid(int points) {
    DpOptions o;
    o.grid_points = points;
    return o;
}

// Σ_{k<N} E[ε_k²] with no update after the bootstrap: ε_k = Σ_{j<k} a^{k−1−j} W_j.
double open_loop_error(const SystemParams& p, double var) {
    double s = 0.0;
    for (int k = 1; k < p.horizon; ++k)
        for (int j = 0; j < k; ++j) s += std::pow(p.a, 2 * (k - 1 - j)) * var;
    return s;
}

}  // namespace

TEST_CASE("geo_tau sums the delay window") {
    CHECK(geo_tau(1.0, 1) == 1.0);
    CHECK(geo_tau(1.0, 3) == 3.0);
    CHECK(geo_tau(2.0, 2) == 5.0);
    CHECK(geo_tau(0.5, 3) == 1.0 + 0.25 + 0.0625);
}

TEST_CASE("boundary cells at a = 1, tau = 1") {
    const SystemParams p = small(10, 0.3);
    const DpTables t = boundary_tables(p);
    const int K = t.effective_horizon;
    REQUIRE(K == 9);
    CHECK(t.at(K - 1, 0).s == 1.0);
    CHECK(t.at(K - 1, 0).c0 == 1.0);
    CHECK(t.at(K - 2, 0).s == 2.0);
    CHECK(t.at(K - 2, 0).c0 == 3.0);
    for (int k = 0; k < K; ++k) {
        CHECK(std::isinf(t.at(k, 0).alpha));
        for (int j = 1; j <= t.q0; ++j) {
            const DpCell& c = t.at(k, j);
            if (j >= K - k) {
                CHECK(c.c0 == (K - k) * t.geo);
                CHECK(c.c1 == c.c0);
                CHECK(c.alpha == 0.0);
            } else {
                CHECK(std::isnan(c.alpha));  // interior: left to the solver
            }
        }
    }
}

TEST_CASE("zero-budget row follows its closed-form recursion") {
    for (double a : {0.6, 1.0, 1.3})
        for (int tau : {1, 2, 3}) {
            const SystemParams p = small(20, 0.2, a, tau);
            const DpTables t = boundary_tables(p);
            const double a2tau = std::pow(a, 2 * tau), g = geo_tau(a, tau);
            double s = 0.0, c0 = 0.0;
            for (int k = t.effective_horizon - 1; k >= 0; --k) {
                const double s_next = s;
                s = a2tau + a * a * s_next;
                c0 = c0 + s_next + g;
                REQUIRE(t.at(k, 0).s == Approx(s).epsilon(1e-14));
                REQUIRE(t.at(k, 0).c0 == Approx(c0).epsilon(1e-14));
            }
        }
}

TEST_CASE("solved tables: signs, finiteness and the c1 = c0 lemma") {
    for (double a : {0.8, 1.0, 1.2}) {
        const SystemParams p = small(30, 0.3, a);
        const DpTables t = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 10.0}, grid(513));
        for (int k = 0; k < t.effective_horizon; ++k)
            for (int j = 0; j <= t.q0; ++j) {
                const DpCell& c = t.at(k, j);
                REQUIRE(c.s > 0.0);
                REQUIRE(c.alpha >= 0.0);
                if (j >= 1) REQUIRE(std::isfinite(c.alpha));
            }
        // Switching out of budget 1 lands on the zero-budget row with S = 0; the two
        // sides are summed in different orders, hence the one-ulp slack.
        for (int k = 0; k + 1 < t.effective_horizon; ++k)
            if (1 < t.effective_horizon - k) CHECK(t.at(k, 1).c1 == Approx(t.at(k, 0).c0).epsilon(1e-14));
        CHECK(t.max_evenness_defect < 1e-10);
    }
}

TEST_CASE("budget covering every step means always switch") {
    const SystemParams p = small(10, 0.9);
    REQUIRE(initial_budget(p) == effective_horizon(p));
    const DpTables t = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 2.0}, grid(257));
    for (int k = 0; k < t.effective_horizon; ++k) CHECK(t.at(k, t.q0 - k).alpha == 0.0);
    // Every ε_k for k ≥ 1 is a single disturbance.
    CHECK(t.value == Approx(9.0 * 4.0).epsilon(1e-12));
}

TEST_CASE("no budget means open-loop error growth") {
    for (double a : {0.7, 1.0, 1.1}) {
        const SystemParams p = small(12, 0.05, a);
        REQUIRE(initial_budget(p) == 0);
        const DpTables t = solve_dp(p, NoiseModel{NoiseKind::Laplace, 3.0}, grid(257));
        CHECK(t.value == Approx(open_loop_error(p, 9.0)).epsilon(1e-12));
    }
}

TEST_CASE("thresholds are scale free in sigma") {
    const SystemParams p = small(25, 0.3);
    const DpTables one = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 1.0}, grid(257));
    const DpTables ten = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 10.0}, grid(257));
    CHECK(ten.value == Approx(100.0 * one.value).epsilon(1e-12));
    for (std::size_t i = 0; i < one.cells.size(); ++i)
        if (std::isfinite(one.cells[i].alpha)) REQUIRE(ten.cells[i].alpha == one.cells[i].alpha);
    CHECK(ten.thresholds().sigma_w() == 10.0);
}

TEST_CASE("doubling the grid moves every threshold by less than half a percent") {
    for (NoiseKind kind : {NoiseKind::Gaussian, NoiseKind::Laplace}) {
        const SystemParams p = small(40, 0.25);
        const DpTables coarse = solve_dp(p, NoiseModel{kind, 1.0}, grid(1025));
        const DpTables fine = solve_dp(p, NoiseModel{kind, 1.0}, grid(2049));
        for (std::size_t i = 0; i < coarse.cells.size(); ++i) {
            const double a = coarse.cells[i].alpha, b = fine.cells[i].alpha;
            if (!std::isfinite(a) || b == 0.0) continue;
            REQUIRE(std::fabs(a - b) <= 0.005 * b);
        }
    }
}

TEST_CASE("discrete noise runs through the same recursion on exact atoms") {
    const SystemParams p = small(6, 0.34);
    const DiscreteNoise d = DiscreteNoise::make({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
    const DpTables t = solve_dp(p, d);
    CHECK(t.max_evenness_defect == 0.0);
    CHECK(std::isfinite(t.value));
    CHECK(t.value > 0.0);
    CHECK(t.value <= open_loop_error(p, 0.5));
}

TEST_CASE("dp tables CSV round trip") {
    const SystemParams p = small(12, 0.3);
    const DpTables t = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 1.0}, grid(257));
    std::stringstream ss;
    write_dp_tables(ss, t);
    const std::string text = ss.str();
    CHECK(text.rfind(std::string(csv::kVersionLine) + "\n", 0) == 0);
    CHECK(text.find("k,j,s,c0,c1,z0,z1,alpha") != std::string::npos);
    const DpTables back = read_dp_tables(ss);
    REQUIRE(back.cells.size() == t.cells.size());
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        const DpCell &x = t.cells[i], &y = back.cells[i];
        for (auto [u, v] : {std::pair{x.s, y.s}, std::pair{x.c0, y.c0}, std::pair{x.c1, y.c1}, std::pair{x.z0, y.z0},
                            std::pair{x.z1, y.z1}, std::pair{x.alpha, y.alpha}})
            REQUIRE(((std::isnan(u) && std::isnan(v)) || u == v));
    }
    std::stringstream again;
    write_dp_tables(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("tiny lattice has exactly the feasible cells") {
    const SystemParams p = small(5, 0.2);  // N = 5, τ = 1, Q0 = 1
    const DpTables t = solve_dp(p, NoiseModel{NoiseKind::Gaussian, 1.0}, grid(257));
    CHECK(t.effective_horizon == 4);
    CHECK(t.q0 == 1);
    CHECK(t.cells.size() == 8);
    CHECK(t.at(3, 1).alpha == 0.0);  // diagonal: one switch, one step left
    for (int k = 0; k < 3; ++k) CHECK(std::isfinite(t.at(k, 1).alpha));
}

TEST_CASE("solver rejects invalid plants") {
    SystemParams p = small(10, 0.3);
    p.tau = 0;
    CHECK_THROWS_AS(solve_dp(p, NoiseModel{}), ValidationError);
}
