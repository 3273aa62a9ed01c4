#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "swlqr/kernels.hpp"
#include "swlqr/measure.hpp"

namespace swlqr {

namespace {

// Positions closer than this (relative) are the same atom; sums like 1 + 2 − 3 must merge.
bool same_atom(double x, double y) { return std::fabs(x - y) <= 1e-12 * (1.0 + std::fabs(x) + std::fabs(y)); }

}  // namespace

AtomMeasure AtomMeasure::point(double x, double mass) {
    AtomMeasure m;
    m.x_ = {x};
    m.w_ = {mass};
    return m;
}

AtomMeasure AtomMeasure::noise_law(const DiscreteNoise& noise, int) { return point(0.0).pushed(1.0, noise); }

double AtomMeasure::mass() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
}

double AtomMeasure::mean() const {
    const kernels::Moments mo = kernels::moments(w_.data(), x_.data(), w_.size());
    return mo.m0 > 0.0 ? mo.m1 / mo.m0 : 0.0;
}

std::vector<double> AtomMeasure::fractions(double lo, double hi) const {
    std::vector<double> f(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) f[i] = (lo < x_[i] && x_[i] < hi) ? 1.0 : 0.0;
    return f;
}

AtomMeasure AtomMeasure::restricted(double lo, double hi) const {
    AtomMeasure out;
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (lo < x_[i] && x_[i] < hi) {
            out.x_.push_back(x_[i]);
            out.w_.push_back(w_[i]);
        }
    return out;
}

AtomMeasure AtomMeasure::pushed(double a, const DiscreteNoise& noise, int) const {
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(x_.size() * noise.values.size());
    for (std::size_t i = 0; i < x_.size(); ++i)
        for (std::size_t j = 0; j < noise.values.size(); ++j)
            if (w_[i] * noise.probs[j] > 0.0) atoms.emplace_back(a * x_[i] + noise.values[j], w_[i] * noise.probs[j]);
    std::sort(atoms.begin(), atoms.end());
    AtomMeasure out;
    for (const auto& [x, w] : atoms) {
        if (!out.x_.empty() && same_atom(out.x_.back(), x)) {
            out.w_.back() += w;
        } else {
            out.x_.push_back(x);
            out.w_.push_back(w);
        }
    }
    return out;
}

void AtomMeasure::add_atom(double x, double mass) {
    auto it = std::lower_bound(x_.begin(), x_.end(), x);
    const auto idx = static_cast<std::size_t>(it - x_.begin());
    if (idx < x_.size() && same_atom(x_[idx], x)) {
        w_[idx] += mass;
    } else if (idx > 0 && same_atom(x_[idx - 1], x)) {
        w_[idx - 1] += mass;
    } else {
        x_.insert(it, x);
        w_.insert(w_.begin() + static_cast<std::ptrdiff_t>(idx), mass);
    }
}

void AtomMeasure::scale(double f) {
    for (double& w : w_) w *= f;
}

double AtomMeasure::evenness_defect() const {
    const double m = mass();
    if (m <= 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const std::size_t j = x_.size() - 1 - i;
        if (!same_atom(x_[i], -x_[j])) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::fabs(w_[i] - w_[j]));
    }
    return worst / m;
}

}  // namespace swlqr
