#include "swlqr/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "swlqr/errors.hpp"

namespace swlqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = 1.7320508075688772;

// w^n-weighted Laplace mass over [l, u] with 0 <= l <= u, scale beta.
double laplace_positive_moment(int n, double l, double u, double beta) {
    auto term = [&](double x) {
        if (std::isinf(x)) return 0.0;
        const double e = std::exp(-x / beta);
        switch (n) {
            case 0: return e;
            case 1: return (x + beta) * e;
            default: return (x * x + 2.0 * beta * x + 2.0 * beta * beta) * e;
        }
    };
    return 0.5 * (term(l) - term(u));
}

double laplace_moment(int n, double lo, double hi, double beta) {
    double total = 0.0;
    if (hi > 0.0) total += laplace_positive_moment(n, std::max(lo, 0.0), hi, beta);
    if (lo < 0.0) {
        const double part = laplace_positive_moment(n, std::max(-hi, 0.0), -lo, beta);
        total += (n % 2 == 1) ? -part : part;
    }
    return total;
}

double gauss_pdf(double w, double s) {
    if (std::isinf(w)) return 0.0;
    const double z = w / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double gauss_cdf(double w, double s) { return 0.5 * std::erfc(-w / (s * kSqrt2)); }

// w * pdf(w), with the limit 0 at infinity.
double gauss_wpdf(double w, double s) { return std::isinf(w) ? 0.0 : w * gauss_pdf(w, s); }

}  // namespace

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::Uniform: return "uniform";
        case NoiseKind::Laplace: return "laplace";
    }
    return "gaussian";
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "gaussian") return NoiseKind::Gaussian;
    if (name == "uniform") return NoiseKind::Uniform;
    if (name == "laplace") return NoiseKind::Laplace;
    throw ValidationError(ErrorCode::InvalidNoise, "unknown noise kind '" + std::string(name) + "'");
}

double NoiseModel::laplace_scale() const { return sigma / kSqrt2; }
double NoiseModel::uniform_half_width() const { return sigma * kSqrt3; }

double NoiseModel::support_half_width() const {
    if (sigma == 0.0) return 0.0;
    return kind == NoiseKind::Uniform ? uniform_half_width() : kInf;
}

double NoiseModel::reach() const {
    switch (kind) {
        case NoiseKind::Gaussian: return 7.5 * sigma;
        case NoiseKind::Uniform: return uniform_half_width();
        case NoiseKind::Laplace: return laplace_scale() * 29.3;  // 0.5 e^{-x/β} = 1e-13
    }
    return 0.0;
}

double NoiseModel::sample(Rng& rng) const {
    if (sigma == 0.0) return 0.0;
    switch (kind) {
        case NoiseKind::Gaussian: {
            std::normal_distribution<double> n(0.0, sigma);
            return n(rng);
        }
        case NoiseKind::Uniform: {
            const double c = uniform_half_width();
            return -c + 2.0 * c * uniform_open(rng);
        }
        case NoiseKind::Laplace: {
            const double u = uniform_open(rng) - 0.5;
            const double beta = laplace_scale();
            return u < 0.0 ? beta * std::log1p(2.0 * u) : -beta * std::log1p(-2.0 * u);
        }
    }
    return 0.0;
}

double NoiseModel::density(double w) const {
    if (sigma == 0.0) return w == 0.0 ? kInf : 0.0;
    switch (kind) {
        case NoiseKind::Gaussian: return gauss_pdf(w, sigma);
        case NoiseKind::Uniform: {
            const double c = uniform_half_width();
            return std::fabs(w) <= c ? 0.5 / c : 0.0;
        }
        case NoiseKind::Laplace: {
            const double beta = laplace_scale();
            return std::exp(-std::fabs(w) / beta) / (2.0 * beta);
        }
    }
    return 0.0;
}

double NoiseModel::cdf(double w) const {
    if (sigma == 0.0) return w >= 0.0 ? 1.0 : 0.0;
    switch (kind) {
        case NoiseKind::Gaussian: return gauss_cdf(w, sigma);
        case NoiseKind::Uniform: {
            const double c = uniform_half_width();
            return std::clamp((w + c) / (2.0 * c), 0.0, 1.0);
        }
        case NoiseKind::Laplace: {
            const double beta = laplace_scale();
            return w < 0.0 ? 0.5 * std::exp(w / beta) : 1.0 - 0.5 * std::exp(-w / beta);
        }
    }
    return 0.0;
}

double NoiseModel::prob(double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    if (sigma == 0.0) return (lo < 0.0 && 0.0 < hi) ? 1.0 : 0.0;
    if (kind == NoiseKind::Laplace) return laplace_moment(0, lo, hi, laplace_scale());
    if (lo >= 0.0) return std::max(0.0, survival(lo) - survival(hi));
    if (hi <= 0.0) return std::max(0.0, cdf(hi) - cdf(lo));
    return std::max(0.0, 1.0 - cdf(lo) - survival(hi));
}

double NoiseModel::partial_mean(double lo, double hi) const {
    if (!(hi > lo) || sigma == 0.0) return 0.0;
    switch (kind) {
        case NoiseKind::Gaussian: return sigma * sigma * (gauss_pdf(lo, sigma) - gauss_pdf(hi, sigma));
        case NoiseKind::Uniform: {
            const double c = uniform_half_width();
            const double l = std::clamp(lo, -c, c), u = std::clamp(hi, -c, c);
            return (u * u - l * l) / (4.0 * c);
        }
        case NoiseKind::Laplace: return laplace_moment(1, lo, hi, laplace_scale());
    }
    return 0.0;
}

double NoiseModel::partial_second_moment(double lo, double hi) const {
    if (!(hi > lo) || sigma == 0.0) return 0.0;
    switch (kind) {
        case NoiseKind::Gaussian: {
            const double s2 = sigma * sigma;
            return s2 * prob(lo, hi) + s2 * (gauss_wpdf(lo, sigma) - gauss_wpdf(hi, sigma));
        }
        case NoiseKind::Uniform: {
            const double c = uniform_half_width();
            const double l = std::clamp(lo, -c, c), u = std::clamp(hi, -c, c);
            return (u * u * u - l * l * l) / (6.0 * c);
        }
        case NoiseKind::Laplace: return laplace_moment(2, lo, hi, laplace_scale());
    }
    return 0.0;
}

double NoiseModel::sample_truncated(double lo, double hi, double u) const {
    if (sigma == 0.0) return 0.0;
    // Inverse of the lower-tail CDF for p in (0, 1/2], mirrored for the upper tail.
    auto lower_quantile = [&](double p) {
        switch (kind) {
            case NoiseKind::Gaussian: return -sigma * kSqrt2 * boost::math::erfc_inv(2.0 * p);
            case NoiseKind::Uniform: {
                const double c = uniform_half_width();
                return -c + 2.0 * c * p;
            }
            case NoiseKind::Laplace: return laplace_scale() * std::log(2.0 * p);
        }
        return 0.0;
    };
    auto quantile = [&](double p) { return p <= 0.5 ? lower_quantile(p) : -lower_quantile(1.0 - p); };

    const double l = std::max(lo, -support_half_width());
    const double h = std::min(hi, support_half_width());
    double x;
    if (l >= 0.0) {
        const double sl = survival(l), sh = survival(h);
        x = -quantile(std::clamp(sl - u * (sl - sh), 1e-300, 1.0));
    } else {
        const double cl = cdf(l), ch = cdf(h);
        x = quantile(std::clamp(cl + u * (ch - cl), 1e-300, 1.0));
    }
    return std::clamp(x, l, h);
}

}  // namespace swlqr
