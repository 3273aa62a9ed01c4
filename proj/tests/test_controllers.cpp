#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "swlqr/controllers.hpp"
#include "swlqr/engine.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/lqr.hpp"

using namespace swlqr;
using Catch::Approx;

namespace {

double phi_std(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double Phi_std(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

EstimatorState anchored(double x_hat, int k, int tau) {
    EstimatorState est = EstimatorState::bootstrap(tau);
    est.x_hat = x_hat;
    est.last_update_step = k - tau;
    est.m = tau;
    return est;
}

}  // namespace

TEST_CASE("controller kinds parse and print") {
    for (ControllerKind k : {ControllerKind::Optimal, ControllerKind::Zoh, ControllerKind::Impulsive, ControllerKind::StateBased})
        CHECK(parse_controller_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_controller_kind("pid"), ValidationError);
}

TEST_CASE("optimal control examples") {
    const SystemParams p;
    const double L = riccati_steady(p).L;
    CHECK(control_optimal(anchored(0.0, 5, 1), L) == 0.0);
    CHECK(control_optimal(anchored(1.0, 5, 1), L) == Approx(-0.6180339887).epsilon(1e-9));
}

TEST_CASE("without new information U shrinks by a - bL per step") {
    SystemParams p;
    p.a = 1.1;
    p.b = 0.8;
    const double L = riccati_steady(p).L;
    EstimatorState est = EstimatorState::bootstrap(1);
    estimator_receive(est, p, {1, 4.0}, 1);
    double u_prev = control_optimal(est, L);
    estimator_commit(est, p, u_prev);
    for (int k = 2; k < 10; ++k) {
        estimator_receive(est, p, {0, 0.0}, k);
        const double u = control_optimal(est, L);
        CHECK(u / u_prev == Approx(p.a - p.b * L).epsilon(1e-12));
        estimator_commit(est, p, u);
        u_prev = u;
    }
}

TEST_CASE("zoh control holds between updates") {
    const EstimatorState est = anchored(2.0, 7, 1);
    CHECK(control_zoh(est, 0.5, 7, 1, 0.0) == -1.0);
    CHECK(control_zoh(est, 0.5, 8, 1, -1.0) == -1.0);
    const EstimatorState boot = EstimatorState::bootstrap(1);
    // The bootstrap update at k = −τ lands at k = 0 with x̂ = 0.
    CHECK(control_zoh(boot, 0.5, 0, 1, 0.0) == 0.0);
    CHECK(control_zoh(boot, 0.5, 1, 1, 0.0) == 0.0);
}

TEST_CASE("impulsive control acts only at the update instant") {
    SystemParams p;
    CHECK(control_impulsive(anchored(3.0, 4, 1), p, 4) == -3.0);
    CHECK(control_impulsive(anchored(3.0, 4, 1), p, 5) == 0.0);
    p.a = 1.3;
    p.b = 0.5;
    const double x = 2.0;
    const double u = control_impulsive(anchored(x, 4, 1), p, 4);
    CHECK(p.a * x + p.b * u == Approx(0.0).margin(1e-15));
    p.b = 0.0;
    CHECK_THROWS_AS(control_impulsive(anchored(x, 4, 1), p, 4), ValidationError);
}

TEST_CASE("re-anchoring equals coasting with (a - bL) from the update, random parameters") {
    Rng rng = make_rng(12);
    std::uniform_real_distribution<double> ua(-1.5, 1.5), ub(0.3, 2.0), ux(-20.0, 20.0);
    std::uniform_int_distribution<int> ut(1, 4), um(0, 12);
    for (int trial = 0; trial < 300; ++trial) {
        SystemParams p;
        p.a = ua(rng);
        p.b = ub(rng);
        p.tau = ut(rng);
        const double L = riccati_steady(p).L;
        EstimatorState est = EstimatorState::bootstrap(p.tau);
        // Arbitrary inputs during the delay window, then an update of X_t at k = t + τ.
        std::vector<double> window;
        for (int j = 0; j < p.tau; ++j) {
            const double u = ux(rng);
            window.push_back(u);
            estimator_commit(est, p, u);
        }
        const double xt = ux(rng);
        const int k0 = p.tau;
        estimator_receive(est, p, {1, xt}, k0);
        double rebuilt = ipow(p.a, p.tau) * xt;
        for (int j = 0; j < p.tau; ++j) rebuilt += ipow(p.a, p.tau - 1 - j) * p.b * window[static_cast<std::size_t>(j)];
        REQUIRE(est.x_hat == Approx(rebuilt).epsilon(1e-12).margin(1e-12));

        const int steps = um(rng);
        for (int m = 1; m <= steps; ++m) {
            estimator_commit(est, p, control_optimal(est, L));
            estimator_receive(est, p, {0, 0.0}, k0 + m);
        }
        const double coasted = ipow(p.a - p.b * L, steps) * rebuilt;
        REQUIRE(est.x_hat == Approx(coasted).epsilon(1e-12).margin(1e-12 * std::fabs(rebuilt)));
        REQUIRE(est.m == p.tau + steps);
    }
}

TEST_CASE("estimation error under a symmetric policy is the noise since the last sample") {
    SystemParams p;
    p.a = 0.95;
    p.tau = 2;
    p.horizon = 60;
    const NoiseModel noise{NoiseKind::Laplace, 3.0};
    PolicySpec spec;
    spec.switching = SwitchingKind::Bernoulli;
    spec.controller = ControllerKind::Optimal;
    const BoundPolicy pol(spec, p, noise);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng noise_rng = make_rng(seed, 0), policy_rng = make_rng(seed, 1);
        Rng replay = make_rng(seed, 0);  // same stream: the disturbances, in order
        LoopState ls = pol.init();
        std::vector<double> w;
        std::vector<int> d;
        int t = -p.tau;  // sample time of the latest update the controller holds
        for (int k = 0; k < p.horizon; ++k) {
            const StepRecord rec = pol.step(ls, noise_rng, policy_rng);
            d.push_back(rec.decision);
            if (k - p.tau >= 0 && d[static_cast<std::size_t>(k - p.tau)] == 1) t = k - p.tau;
            double expect = 0.0;
            for (int j = std::max(t, 0); j < k; ++j) expect += ipow(p.a, k - 1 - j) * w[static_cast<std::size_t>(j)];
            REQUIRE(rec.x - rec.x_hat == Approx(expect).margin(1e-10 * (1.0 + std::fabs(rec.x))));
            w.push_back(noise.sample(replay));
        }
    }
}

TEST_CASE("truncated mean: single symmetric slab has zero mean") {
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    const TruncatedMean tm = conditional_truncated_mean(g, 1.0, {0.0}, 1.3);
    CHECK(tm.c[0] == Approx(0.0).margin(1e-14));
    CHECK(tm.event_prob == Approx(Phi_std(1.3) - Phi_std(-1.3)).epsilon(1e-9));
}

TEST_CASE("truncated mean: one slab against the truncated-normal closed form") {
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    // |1 + W| ≤ 1 ⇔ −2 ≤ W ≤ 0.
    const double oracle = (phi_std(-2.0) - phi_std(0.0)) / (Phi_std(0.0) - Phi_std(-2.0));
    const TruncatedMean tm = conditional_truncated_mean(g, 1.0, {1.0}, 1.0);
    CHECK_FALSE(tm.monte_carlo);
    CHECK(tm.c[0] == Approx(oracle).epsilon(1e-9));
    CHECK(tm.c[0] < 0.0);  // pulled toward the interval centre
}

TEST_CASE("truncated mean: gamma to infinity removes the conditioning") {
    const NoiseModel g{NoiseKind::Gaussian, 2.0};
    for (double gamma : {static_cast<double>(INFINITY), 1e6}) {
        const TruncatedMean tm = conditional_truncated_mean(g, 0.9, {0.3, -1.0, 2.0}, gamma);
        for (double c : tm.c) CHECK(c == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("truncated mean: sign follows the opposite of the shift") {
    const NoiseModel l{NoiseKind::Laplace, 1.0};
    Rng rng = make_rng(4);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    for (int i = 0; i < 30; ++i) {
        const double xi = ux(rng);
        if (std::fabs(xi) < 1e-3) continue;
        const TruncatedMean tm = conditional_truncated_mean(l, 1.0, {xi}, 1.5);
        CHECK(tm.c[0] * xi < 0.0);
    }
}

TEST_CASE("truncated mean: quadrature and Monte Carlo agree within three standard errors") {
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    TruncatedMeanOptions mc;
    mc.max_quadrature_dim = 0;
    for (const std::vector<double>& xi : {std::vector<double>{0.8}, std::vector<double>{0.5, -0.7},
                                          std::vector<double>{1.2, 0.4, 1.5}}) {
        const TruncatedMean q = conditional_truncated_mean(g, 1.0, xi, 1.0);
        const TruncatedMean m = conditional_truncated_mean(g, 1.0, xi, 1.0, mc);
        REQUIRE(m.monte_carlo);
        for (std::size_t i = 0; i < xi.size(); ++i) CHECK(std::fabs(q.c[i] - m.c[i]) < 3.0 * m.std_error[i]);
        CHECK(m.event_prob == Approx(q.event_prob).epsilon(0.02));
    }
}

TEST_CASE("truncated mean: impossible event raises EmptyEvent") {
    const NoiseModel u{NoiseKind::Uniform, 1.0};
    try {
        conditional_truncated_mean(u, 1.0, {10.0}, 1.0);
        FAIL("expected EmptyEvent");
    } catch (const NumericalError& e) {
        CHECK(e.code() == ErrorCode::EmptyEvent);
    }
    const NoiseModel zero{NoiseKind::Gaussian, 0.0};
    CHECK_THROWS_AS(conditional_truncated_mean(zero, 1.0, {2.0}, 1.0), NumericalError);
    CHECK(conditional_truncated_mean(zero, 1.0, {0.5}, 1.0).event_prob == 1.0);
}

TEST_CASE("state-based filter matches the truncated-mean reference") {
    SystemParams p;
    p.a = 0.9;
    p.b = 1.0;
    p.sigma_w = 1.0;
    p.horizon = 100;
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    const double gamma = 1.2;
    const double xt = 0.7;
    const std::vector<double> inputs{0.3, -0.2, 0.1, 0.25, -0.4, 0.05, 0.2, -0.1, 0.3, 0.0};
    for (int m = 1; m <= 5; ++m) {
        StateBasedEstimator sb(p, g, gamma, 2049);
        // Inputs U_0..U_3 are committed before the update of X_4 lands at k = 5.
        for (int k = 0; k < 5; ++k) sb.commit(inputs[static_cast<std::size_t>(k)]);
        sb.receive({1, xt}, 5);
        std::vector<double> xi;
        double known = xt;
        for (int j = 1; j <= m; ++j) {
            sb.commit(inputs[static_cast<std::size_t>(4 + j)]);
            sb.receive({0, 0.0}, 5 + j);
            known = p.a * known + p.b * inputs[static_cast<std::size_t>(3 + j)];  // ξ_j uses U_{t+j−1}
            xi.push_back(known);
        }
        REQUIRE(sb.xi() == Approx(known).epsilon(1e-12));
        const TruncatedMean tm = conditional_truncated_mean(g, p.a, xi, gamma);
        double ref = 0.0;
        for (int i = 0; i < m; ++i) ref += ipow(p.a, m - 1 - i) * tm.c[static_cast<std::size_t>(i)];
        const double tol = tm.monte_carlo ? 4.0 * std::sqrt(static_cast<double>(m)) * tm.std_error[0] + 2e-3 : 2e-3;
        INFO("m = " << m << " filter " << sb.silence_mean() << " reference " << ref);
        CHECK(std::fabs(sb.silence_mean() - ref) < tol);
    }
}

TEST_CASE("state-based controller: zero shift gives zero input") {
    SystemParams p;
    p.sigma_w = 1.0;
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    StateBasedEstimator sb(p, g, 1.0);
    sb.commit(0.0);
    sb.receive({1, 0.0}, 2);
    sb.commit(0.0);
    sb.receive({0, 0.0}, 3);  // m = 1 with ξ_1 = 0
    CHECK(sb.silence_mean() == Approx(0.0).margin(1e-14));
    CHECK(control_state_based(sb, 0.618) == Approx(0.0).margin(1e-14));
}

TEST_CASE("state-based controller: one step equals -L (xi + C)") {
    SystemParams p;
    p.sigma_w = 1.0;
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    const double L = riccati_steady(p).L;
    StateBasedEstimator sb(p, g, 1.0, 4097);
    sb.commit(0.0);
    sb.receive({1, 1.0}, 2);  // X_1 = 1
    sb.commit(0.0);
    sb.receive({0, 0.0}, 3);  // silence at sample time 2: |1 + W_1| ≤ 1
    const TruncatedMean tm = conditional_truncated_mean(g, 1.0, {1.0}, 1.0);
    // τ = 1: x̂ = a(ξ + C) + b U_2, with U_2 not yet applied (0 here).
    CHECK(sb.x_hat() == Approx(1.0 + tm.c[0]).margin(1e-4));
    CHECK(control_state_based(sb, L) == Approx(-L * (1.0 + tm.c[0])).margin(1e-4));
}

TEST_CASE("state-based estimator with infinite gamma reproduces the symmetric estimator") {
    SystemParams p;
    p.a = 1.05;
    p.tau = 2;
    p.horizon = 50;
    const NoiseModel g{NoiseKind::Gaussian, 10.0};
    PolicySpec spec;
    spec.switching = SwitchingKind::Bernoulli;
    const BoundPolicy pol(spec, p, g);
    Rng nr = make_rng(9, 0), pr = make_rng(9, 1);
    LoopState ls = pol.init();
    StateBasedEstimator sb(p, g, INFINITY);
    for (int k = 0; k < p.horizon; ++k) {
        DelayPipeline pipe = ls.pipe;
        const StepRecord rec = pol.step(ls, nr, pr);
        const PipelineEntry out = pipe.push({rec.decision, rec.x});
        sb.receive(out, k);
        REQUIRE(sb.x_hat() == Approx(rec.x_hat).epsilon(1e-10).margin(1e-9));
        sb.commit(rec.u);
    }
}

TEST_CASE("state-based estimator rejects a silence that cannot happen") {
    SystemParams p;
    p.sigma_w = 0.0;
    const NoiseModel zero{NoiseKind::Gaussian, 0.0};
    StateBasedEstimator sb(p, zero, 1.0);
    sb.commit(0.0);
    sb.receive({1, 5.0}, 2);
    sb.commit(0.0);
    CHECK_THROWS_AS(sb.receive({0, 0.0}, 3), NumericalError);
    CHECK_THROWS_AS(StateBasedEstimator(p, zero, -1.0), ValidationError);
}
