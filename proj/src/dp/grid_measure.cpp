#include <algorithm>
#include <cmath>
#include <limits>

#include "swlqr/errors.hpp"
#include "swlqr/kernels.hpp"
#include "swlqr/measure.hpp"

namespace swlqr {

GridMeasure GridMeasure::point(double x, double mass) {
    GridMeasure m;
    m.center_ = x;
    m.w_ = {mass};
    return m;
}

GridMeasure GridMeasure::noise_law(const NoiseModel& noise, int points) { return point(0.0).pushed(1.0, noise, points); }

double GridMeasure::position(std::size_t i) const {
    const double half = 0.5 * static_cast<double>(w_.size() - 1);
    return center_ + (static_cast<double>(i) - half) * h_;
}

std::vector<double> GridMeasure::positions() const {
    std::vector<double> x(w_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = position(i);
    return x;
}

double GridMeasure::mass() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
}

double GridMeasure::mean() const {
    const auto x = positions();
    const kernels::Moments mo = kernels::moments(w_.data(), x.data(), w_.size());
    return mo.m0 > 0.0 ? mo.m1 / mo.m0 : 0.0;
}

std::vector<double> GridMeasure::fractions(double lo, double hi) const {
    std::vector<double> f(w_.size(), 0.0);
    if (!(hi > lo)) return f;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        const double x = position(i);
        if (h_ == 0.0) {
            f[i] = (lo < x && x < hi) ? 1.0 : 0.0;
            continue;
        }
        const double l = std::max(lo, x - 0.5 * h_);
        const double u = std::min(hi, x + 0.5 * h_);
        f[i] = u > l ? std::min(1.0, (u - l) / h_) : 0.0;
    }
    return f;
}

GridMeasure GridMeasure::restricted(double lo, double hi) const {
    GridMeasure out = *this;
    const auto f = fractions(lo, hi);
    for (std::size_t i = 0; i < w_.size(); ++i) out.w_[i] *= f[i];
    return out;
}

GridMeasure GridMeasure::pushed(double a, const NoiseModel& noise, int points) const {
    if (points < 3 || points % 2 == 0)
        throw ValidationError(ErrorCode::InvalidArgument, "grid size must be odd and at least 3");
    std::size_t i0 = 0, i1 = w_.size();
    while (i0 < w_.size() && w_[i0] == 0.0) ++i0;
    while (i1 > i0 && w_[i1 - 1] == 0.0) --i1;
    if (i0 >= i1) return {};
    --i1;

    const double xlo = position(i0), xhi = position(i1);
    const double width = std::fabs(a) * (xhi - xlo);
    const double reach = noise.reach();
    double mid = 0.5 * a * (xlo + xhi);
    // Keep a grid centred at exactly 0 when the support is symmetric up to roundoff.
    if (std::fabs(mid) <= 1e-12 * (width + reach)) mid = 0.0;
    if (width + 2.0 * reach == 0.0) return point(mid, mass());

    const double h = (width + 2.0 * reach) / (points - 1);
    const long d_max = reach > 0.0 ? static_cast<long>(std::ceil(reach / h - 1e-9)) : 0;
    const long p_half = static_cast<long>(std::ceil(0.5 * width / h - 1e-9));
    const long offset = p_half + d_max;
    const auto n = static_cast<std::size_t>(2 * offset + 1);

    // Linear split of a x_i onto the nodes keeps mass and mean.
    std::vector<double> v(n, 0.0);
    for (std::size_t i = i0; i <= i1; ++i) {
        if (w_[i] == 0.0) continue;
        const double f = (a * position(i) - mid) / h + static_cast<double>(offset);
        double fl = std::floor(f);
        fl = std::clamp(fl, static_cast<double>(d_max), static_cast<double>(n - 1 - d_max));
        const auto lo = static_cast<std::size_t>(fl);
        const double frac = std::clamp(f - fl, 0.0, 1.0);
        v[lo] += w_[i] * (1.0 - frac);
        if (frac > 0.0) v[lo + 1] += w_[i] * frac;
    }

    // Cell probabilities of W, tails lumped into the outermost cells.
    std::vector<double> kern(static_cast<std::size_t>(2 * d_max + 1));
    for (long d = -d_max; d <= d_max; ++d) {
        const double lo = d == -d_max ? -std::numeric_limits<double>::infinity() : (d - 0.5) * h;
        const double hi = d == d_max ? std::numeric_limits<double>::infinity() : (d + 0.5) * h;
        kern[static_cast<std::size_t>(d + d_max)] = d_max == 0 ? 1.0 : noise.prob(lo, hi);
    }

    GridMeasure out;
    out.center_ = mid;
    out.h_ = h;
    out.w_.assign(n, 0.0);
    const std::size_t inner = n - 2 * static_cast<std::size_t>(d_max);
    for (long d = -d_max; d <= d_max; ++d) {
        const double k = kern[static_cast<std::size_t>(d + d_max)];
        if (k == 0.0) continue;
        kernels::axpy(k, v.data() + d_max, out.w_.data() + d_max + d, inner);
    }
    return out;
}

void GridMeasure::add_atom(double x, double mass) {
    if (w_.empty()) {
        *this = point(x, mass);
        return;
    }
    if (h_ == 0.0) {
        if (x != center_) throw ValidationError(ErrorCode::InvalidArgument, "atom outside a single-point grid");
        w_[0] += mass;
        return;
    }
    const double f = (x - center_) / h_ + 0.5 * static_cast<double>(w_.size() - 1);
    if (f < -1e-9 || f > static_cast<double>(w_.size() - 1) + 1e-9)
        throw ValidationError(ErrorCode::InvalidArgument, "atom outside the grid");
    const double fl = std::clamp(std::floor(f), 0.0, static_cast<double>(w_.size() - 1));
    const auto lo = static_cast<std::size_t>(fl);
    const double frac = std::clamp(f - fl, 0.0, 1.0);
    w_[lo] += mass * (1.0 - frac);
    if (frac > 0.0) w_[lo + 1] += mass * frac;
}

void GridMeasure::scale(double f) {
    for (double& w : w_) w *= f;
}

double GridMeasure::evenness_defect() const {
    const double m = mass();
    if (m <= 0.0) return 0.0;
    if (center_ != 0.0) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) worst = std::max(worst, std::fabs(w_[i] - w_[w_.size() - 1 - i]));
    return worst / m;
}

}  // namespace swlqr
