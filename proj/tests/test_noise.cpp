#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "catch_amalgamated.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/noise.hpp"

using namespace swlqr;
using Catch::Approx;

namespace {

const NoiseKind kKinds[] = {NoiseKind::Gaussian, NoiseKind::Uniform, NoiseKind::Laplace};

// Composite Simpson on [lo, hi]; n even.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

// Integrates over [lo, hi] split at 0 and at the support edges, where the
// uniform and Laplace densities have kinks.
double integrate(const NoiseModel& m, const std::function<double(double)>& f, double lo, double hi) {
    std::vector<double> cuts{lo, hi};
    for (double c : {0.0, -m.support_half_width(), m.support_half_width()})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    // The density is read just inside each piece, so a jump at a cut is never sampled.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double l = cuts[i], u = cuts[i + 1], eps = 1e-12 * (u - l);
        s += simpson([&](double w) { return m.density(std::clamp(w, l + eps, u - eps)) * f(w); }, l, u, 4000);
    }
    return s;
}

// Maclaurin series of erf, independent of std::erf.
double erf_series(double x) {
    double term = x, sum = x;
    for (int n = 1; n < 60; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    return 2.0 / std::sqrt(M_PI) * sum;
}

}  // namespace

TEST_CASE("noise kinds parse and print") {
    for (NoiseKind k : kKinds) CHECK(parse_noise_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_noise_kind("cauchy"), ValidationError);
}

TEST_CASE("gaussian cdf against a series oracle") {
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    CHECK(g.cdf(0.0) == 0.5);
    const double oracle = erf_series(1.0 / std::sqrt(2.0));
    CHECK(g.cdf(1.0) - g.cdf(-1.0) == Approx(oracle).epsilon(1e-12));
    CHECK(oracle == Approx(0.6827).margin(5e-5));
    CHECK(g.prob(-1.0, 1.0) == Approx(oracle).epsilon(1e-12));
}

TEST_CASE("uniform and laplace shape parameters") {
    const NoiseModel u{NoiseKind::Uniform, 10.0};
    CHECK(u.uniform_half_width() == Approx(10.0 * std::sqrt(3.0)));
    CHECK(u.uniform_half_width() == Approx(17.3205).margin(1e-4));
    CHECK(u.density(20.0) == 0.0);
    const NoiseModel l{NoiseKind::Laplace, 10.0};
    CHECK(l.laplace_scale() == Approx(7.0711).margin(1e-4));
}

TEST_CASE("densities are even, integrate to one, and have variance sigma^2") {
    for (NoiseKind k : kKinds) {
        const NoiseModel m{k, 3.0};
        const double r = std::isinf(m.support_half_width()) ? 40.0 * m.sigma : m.support_half_width();
        CHECK(integrate(m, [](double) { return 1.0; }, -r, r) == Approx(1.0).margin(1e-6));
        CHECK(integrate(m, [](double w) { return w * w; }, -r, r) == Approx(9.0).epsilon(1e-6));
        for (double w : {0.1, 1.0, 2.5, 5.0, 11.0}) CHECK(m.density(w) == m.density(-w));
    }
}

TEST_CASE("cdf is monotone with cdf(-w) = 1 - cdf(w)") {
    for (NoiseKind k : kKinds) {
        const NoiseModel m{k, 2.0};
        double prev = 0.0;
        for (double w = -15.0; w <= 15.0; w += 0.01) {
            const double c = m.cdf(w);
            REQUIRE(c >= prev);
            REQUIRE(m.cdf(-w) == Approx(1.0 - c).margin(1e-15));
            prev = c;
        }
    }
}

TEST_CASE("interval probabilities and partial moments match quadrature") {
    const std::pair<double, double> intervals[] = {{-1.0, 2.0}, {0.5, 3.0}, {-4.0, -0.2}, {-10.0, 10.0}, {2.9, 3.1}};
    for (NoiseKind k : kKinds) {
        const NoiseModel m{k, 1.7};
        for (auto [lo, hi] : intervals) {
            CHECK(m.prob(lo, hi) == Approx(integrate(m, [](double) { return 1.0; }, lo, hi)).margin(1e-9));
            CHECK(m.partial_mean(lo, hi) == Approx(integrate(m, [](double w) { return w; }, lo, hi)).margin(1e-9));
            CHECK(m.partial_second_moment(lo, hi) ==
                  Approx(integrate(m, [](double w) { return w * w; }, lo, hi)).margin(1e-9));
        }
        CHECK(m.prob(1.0, 1.0) == 0.0);
        CHECK(m.prob(2.0, 1.0) == 0.0);
    }
}

TEST_CASE("far-tail probabilities keep relative accuracy") {
    const NoiseModel g{NoiseKind::Gaussian, 1.0};
    // Pr(W > 10) = erfc(10/√2)/2 ≈ 7.6199e-24
    CHECK(g.prob(10.0, INFINITY) == Approx(7.61985302416e-24).epsilon(1e-9));
    CHECK(g.prob(-INFINITY, -10.0) == Approx(7.61985302416e-24).epsilon(1e-9));
}

TEST_CASE("sample moments over a million draws") {
    for (NoiseKind k : kKinds) {
        const NoiseModel m{k, 10.0};
        Rng rng = make_rng(2024, static_cast<std::uint32_t>(k));
        const int n = 1000000;
        double s1 = 0.0, s2 = 0.0, s3 = 0.0, maxabs = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = m.sample(rng);
            s1 += w;
            s2 += w * w;
            s3 += w * w * w;
            maxabs = std::max(maxabs, std::fabs(w));
        }
        const double mean = s1 / n, var = s2 / n - mean * mean;
        CHECK(std::fabs(mean) < 3.0 * m.sigma / 1000.0);
        CHECK(var == Approx(100.0).epsilon(0.01));
        // Skewness SE is about √(15/n) for Laplace, the heaviest of the three.
        const double skew = (s3 / n) / std::pow(var, 1.5);
        CHECK(std::fabs(skew) < 5.0 * std::sqrt(15.0 / n));
        if (k == NoiseKind::Uniform) CHECK(maxabs <= 10.0 * std::sqrt(3.0));
    }
}

TEST_CASE("gaussian sample mean within 0.05 over a million draws") {
    const NoiseModel m{NoiseKind::Gaussian, 10.0};
    Rng rng = make_rng(99);
    double s = 0.0;
    for (int i = 0; i < 1000000; ++i) s += m.sample(rng);
    CHECK(std::fabs(s / 1e6) < 0.05);
}

TEST_CASE("truncated draws stay inside and average to the truncated mean") {
    for (NoiseKind k : kKinds) {
        const NoiseModel m{k, 1.0};
        Rng rng = make_rng(5);
        for (auto [lo, hi] : {std::pair{-0.3, 1.2}, std::pair{1.0, 1.5}, std::pair{-2.0, -1.0}}) {
            double s = 0.0;
            const int n = 200000;
            for (int i = 0; i < n; ++i) {
                const double w = m.sample_truncated(lo, hi, uniform_open(rng));
                REQUIRE(w >= lo);
                REQUIRE(w <= hi);
                s += w;
            }
            CHECK(s / n == Approx(m.partial_mean(lo, hi) / m.prob(lo, hi)).margin(0.005));
        }
    }
}

TEST_CASE("zero sigma is a point mass at zero") {
    const NoiseModel z{NoiseKind::Laplace, 0.0};
    Rng rng = make_rng(1);
    CHECK(z.sample(rng) == 0.0);
    CHECK(z.prob(-1.0, 1.0) == 1.0);
    CHECK(z.prob(0.0, 1.0) == 0.0);
    CHECK(z.partial_second_moment(-1.0, 1.0) == 0.0);
}
