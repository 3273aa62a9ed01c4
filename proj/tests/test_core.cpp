#include <cmath>
#include <deque>

#include "catch_amalgamated.hpp"
#include "swlqr/core.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/rng.hpp"

using namespace swlqr;

namespace {

ErrorCode code_of(const SystemParams& p) {
    try {
        validate_params(p);
    } catch (const ValidationError& e) {
        return e.code();
    }
    FAIL("expected a ValidationError");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("default plant is accepted unchanged") {
    const SystemParams p;
    CHECK(p.a == 1.0);
    CHECK(p.sigma_w == 10.0);
    CHECK(p.horizon == 100);
    CHECK(validate_params(p) == p);
}

TEST_CASE("validation rejects each bad field with its own code") {
    SystemParams p;
    p.tau = 0;
    CHECK(code_of(p) == ErrorCode::NonCausal);
    p = {};
    p.rate = 0.0;
    CHECK(code_of(p) == ErrorCode::InvalidRate);
    p = {};
    p.rate = 1.5;
    CHECK(code_of(p) == ErrorCode::InvalidRate);
    p = {};
    p.q = 0.0;
    CHECK(code_of(p) == ErrorCode::InvalidWeight);
    p = {};
    p.r = -1.0;
    CHECK(code_of(p) == ErrorCode::InvalidWeight);
    p = {};
    p.horizon = 2;  // needs N > τ + 1
    CHECK(code_of(p) == ErrorCode::InvalidHorizon);
    p = {};
    p.sigma_w = -1.0;
    CHECK(code_of(p) == ErrorCode::InvalidNoise);
    p = {};
    p.a = NAN;
    CHECK(code_of(p) == ErrorCode::InvalidArgument);
}

TEST_CASE("rate one and zero noise are valid edge cases") {
    SystemParams p;
    p.rate = 1.0;
    p.sigma_w = 0.0;
    CHECK_NOTHROW(validate_params(p));
    p.horizon = 3;
    p.tau = 1;
    CHECK_NOTHROW(validate_params(p));
}

TEST_CASE("initial budget floors N r_s without roundoff loss") {
    SystemParams p;
    CHECK(initial_budget(p) == 40);
    p.rate = 0.29;  // 100 * 0.29 = 28.999999999999996 in binary
    CHECK(initial_budget(p) == 29);
    p.horizon = 10;
    p.rate = 0.35;
    CHECK(initial_budget(p) == 3);
    CHECK(effective_horizon(p) == 9);
}

TEST_CASE("ipow matches repeated multiplication") {
    CHECK(ipow(2.0, 0) == 1.0);
    CHECK(ipow(2.0, 10) == 1024.0);
    CHECK(ipow(-0.5, 3) == -0.125);
}

TEST_CASE("budget never goes negative and counts switches") {
    BudgetState b(2);
    b.consume(0);
    CHECK(b.q_remaining() == 2);
    b.consume(1);
    b.consume(1);
    CHECK(b.exhausted());
    CHECK(b.switches_used() == 2);
    CHECK_THROWS_AS(b.consume(1), ValidationError);
    CHECK(b.q_remaining() == 0);
}

TEST_CASE("pipeline emits exactly what entered tau steps earlier") {
    for (int tau : {1, 2, 3, 7}) {
        DelayPipeline pipe(tau);
        std::deque<PipelineEntry> model(static_cast<std::size_t>(tau));  // independent FIFO
        Rng rng = make_rng(static_cast<std::uint64_t>(tau));
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int k = 0; k < 200; ++k) {
            const PipelineEntry in{static_cast<int>(rng() & 1), u(rng)};
            const PipelineEntry out = pipe.push(in);
            model.push_back(in);
            CHECK(out.decision == model.front().decision);
            CHECK(out.state == model.front().state);
            model.pop_front();
        }
        CHECK(pipe.delay() == tau);
    }
}

TEST_CASE("bootstrap pipeline delivers the switch from k = -tau first") {
    DelayPipeline pipe = DelayPipeline::bootstrap(3);
    const PipelineEntry first = pipe.push({0, 9.0});
    CHECK(first.decision == 1);
    CHECK(first.state == 0.0);
    CHECK(pipe.push({0, 9.0}).decision == 0);
    CHECK(pipe.push({0, 9.0}).decision == 0);
    CHECK(pipe.push({0, 0.0}).state == 9.0);
}

TEST_CASE("seeding is deterministic and streams are distinct") {
    CHECK(sub_seed(0xabc, 5) == (0xabcULL ^ 5ULL));
    Rng a = make_rng(42, 0), b = make_rng(42, 0), c = make_rng(42, 1);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    Rng r = make_rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double v = uniform_open(r);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("error codes have names") {
    CHECK(std::string(to_string(ErrorCode::NonCausal)).size() > 0);
    const NumericalError e(ErrorCode::EmptyEvent, "x");
    CHECK(e.code() == ErrorCode::EmptyEvent);
}
