#pragma once

#include <cstddef>
#include <vector>

#include "swlqr/noise.hpp"

namespace swlqr {

// Zero-mean symmetric law on finitely many points. Interval queries use strict
// inequalities, matching the "stay silent iff S² < θ" gate.
struct DiscreteNoise {
    std::vector<double> values;
    std::vector<double> probs;

    // Throws ValidationError(InvalidNoise) unless probs sum to 1 and the law is even.
    static DiscreteNoise make(std::vector<double> values, std::vector<double> probs);

    double prob(double lo, double hi) const;
    double partial_mean(double lo, double hi) const;
    double partial_second_moment(double lo, double hi) const;
    double variance() const;
    double sample(Rng& rng) const;
};

// Finite measure made of point masses on a uniform grid of odd length,
// x_i = center + (i - (n-1)/2) h. A single point has h = 0.
class GridMeasure {
public:
    GridMeasure() = default;
    static GridMeasure point(double x, double mass = 1.0);
    // Law of W discretized with `points` cells; tails are lumped into the edge cells.
    static GridMeasure noise_law(const NoiseModel& noise, int points);

    bool empty() const { return w_.empty(); }
    std::size_t size() const { return w_.size(); }
    double center() const { return center_; }
    double step() const { return h_; }
    double position(std::size_t i) const;
    std::vector<double> positions() const;
    const std::vector<double>& weights() const { return w_; }
    double mass() const;
    double mean() const;

    // Share of each cell [x_i - h/2, x_i + h/2] inside (lo, hi); indicator when h = 0.
    std::vector<double> fractions(double lo, double hi) const;
    GridMeasure restricted(double lo, double hi) const;

    // Law of a S + W for S under this measure, resampled on `points` nodes. Mass and
    // mean are kept exactly; symmetric input gives a symmetric grid and weights.
    GridMeasure pushed(double a, const NoiseModel& noise, int points) const;

    // Adds mass at x by linear split; x must lie within the grid.
    void add_atom(double x, double mass);
    void scale(double f);

    // max |w_i - w_{n-1-i}| / mass on a grid centred at 0; +inf on an off-centre grid.
    double evenness_defect() const;

private:
    double center_ = 0.0;
    double h_ = 0.0;
    std::vector<double> w_;
};

// Exact finite measure: sorted distinct atoms.
class AtomMeasure {
public:
    AtomMeasure() = default;
    static AtomMeasure point(double x, double mass = 1.0);
    static AtomMeasure noise_law(const DiscreteNoise& noise, int points = 0);

    bool empty() const { return x_.empty(); }
    std::size_t size() const { return x_.size(); }
    const std::vector<double>& positions() const { return x_; }
    const std::vector<double>& weights() const { return w_; }
    double mass() const;
    double mean() const;

    std::vector<double> fractions(double lo, double hi) const;
    AtomMeasure restricted(double lo, double hi) const;
    AtomMeasure pushed(double a, const DiscreteNoise& noise, int points = 0) const;
    void add_atom(double x, double mass);
    void scale(double f);
    double evenness_defect() const;

private:
    std::vector<double> x_;
    std::vector<double> w_;
};

// Per-atom statistics of the next gate: for atom x_i,
// pass[i] = Pr(lo < a x_i + W < hi) and w2[i] = E[W²; lo < a x_i + W < hi].
struct GateTables {
    std::vector<double> pass;
    std::vector<double> w2;
};

template <class Measure, class Noise>
GateTables gate_tables(const Measure& m, double a, const Noise& noise, double lo, double hi) {
    GateTables g;
    const auto xs = m.positions();
    g.pass.resize(xs.size());
    g.w2.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double shift = a * xs[i];
        g.pass[i] = noise.prob(lo - shift, hi - shift);
        g.w2[i] = noise.partial_second_moment(lo - shift, hi - shift);
    }
    return g;
}

}  // namespace swlqr
