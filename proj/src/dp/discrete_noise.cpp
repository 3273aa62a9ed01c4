#include <algorithm>
#include <cmath>
#include <numeric>

#include "swlqr/errors.hpp"
#include "swlqr/measure.hpp"

namespace swlqr {

DiscreteNoise DiscreteNoise::make(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw ValidationError(ErrorCode::InvalidNoise, "discrete noise needs one probability per value");
    for (double p : probs)
        if (!(p >= 0.0)) throw ValidationError(ErrorCode::InvalidNoise, "negative probability");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-12) throw ValidationError(ErrorCode::InvalidNoise, "probabilities must sum to 1");
    DiscreteNoise n{std::move(values), std::move(probs)};
    // Evenness: the mass at v equals the mass at -v.
    for (std::size_t i = 0; i < n.values.size(); ++i) {
        const double mirror = n.prob(-n.values[i] - 1e-12, -n.values[i] + 1e-12);
        const double self = n.prob(n.values[i] - 1e-12, n.values[i] + 1e-12);
        if (std::fabs(mirror - self) > 1e-12) throw ValidationError(ErrorCode::InvalidNoise, "discrete noise must be even");
    }
    return n;
}

double DiscreteNoise::prob(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (lo < values[i] && values[i] < hi) s += probs[i];
    return s;
}

double DiscreteNoise::partial_mean(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (lo < values[i] && values[i] < hi) s += probs[i] * values[i];
    return s;
}

double DiscreteNoise::partial_second_moment(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (lo < values[i] && values[i] < hi) s += probs[i] * values[i] * values[i];
    return s;
}

double DiscreteNoise::variance() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * values[i] * values[i];
    return s;
}

double DiscreteNoise::sample(Rng& rng) const {
    double u = uniform_open(rng);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (u < probs[i]) return values[i];
        u -= probs[i];
    }
    return values.back();
}

}  // namespace swlqr
