#pragma once

#include <string>
#include <string_view>

#include "swlqr/rng.hpp"

namespace swlqr {

enum class NoiseKind { Gaussian, Uniform, Laplace };

std::string to_string(NoiseKind kind);
// Throws ValidationError(InvalidNoise) on an unknown name.
NoiseKind parse_noise_kind(std::string_view name);

// Zero-mean, even law with standard deviation sigma. sigma = 0 is a point mass at 0.
// Uniform has half-width sigma*sqrt(3); Laplace has scale sigma/sqrt(2).
struct NoiseModel {
    NoiseKind kind = NoiseKind::Gaussian;
    double sigma = 1.0;

    double sample(Rng& rng) const;
    double density(double w) const;
    double cdf(double w) const;
    double survival(double w) const { return cdf(-w); }

    // Pr(lo < W < hi), accurate in both tails.
    double prob(double lo, double hi) const;
    // E[W; lo < W < hi] and E[W^2; lo < W < hi].
    double partial_mean(double lo, double hi) const;
    double partial_second_moment(double lo, double hi) const;

    // Inverse-CDF draw from W conditioned on lo < W < hi, driven by u in (0,1).
    double sample_truncated(double lo, double hi, double u) const;

    double variance() const { return sigma * sigma; }
    // Bounded support half-width, +inf for unbounded laws.
    double support_half_width() const;
    // Half-width holding all but about 1e-13 of the mass.
    double reach() const;
    double laplace_scale() const;
    double uniform_half_width() const;

    bool operator==(const NoiseModel&) const = default;
};

}  // namespace swlqr
