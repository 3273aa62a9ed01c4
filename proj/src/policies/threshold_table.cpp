#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "swlqr/csv.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/policies.hpp"

namespace swlqr {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

ThresholdTable::ThresholdTable(int effective_horizon, int q0, double sigma_w)
    : k_(effective_horizon), q0_(q0), sigma_w_(sigma_w) {
    if (effective_horizon < 0 || q0 < 0)
        throw ValidationError(ErrorCode::InvalidArgument, "threshold table dimensions must be nonnegative");
    alpha_.assign(static_cast<std::size_t>(k_) * static_cast<std::size_t>(q0_ + 1), kMissing);
}

void ThresholdTable::set_alpha(int k, int j, double alpha) {
    if (k < 0 || k >= k_ || j < 0 || j > q0_)
        throw ValidationError(ErrorCode::InvalidArgument, "threshold cell outside the lattice");
    if (!(alpha >= 0.0)) throw ValidationError(ErrorCode::InvalidArgument, "threshold must be nonnegative");
    alpha_[static_cast<std::size_t>(k) * (q0_ + 1) + j] = alpha;
}

std::optional<double> ThresholdTable::alpha(int k, int j) const {
    if (k < 0 || k >= k_ || j < 0 || j > q0_) return std::nullopt;
    const double v = alpha_[static_cast<std::size_t>(k) * (q0_ + 1) + j];
    if (std::isnan(v)) return std::nullopt;
    return v;
}

bool ThresholdTable::operator==(const ThresholdTable& o) const {
    if (k_ != o.k_ || q0_ != o.q0_ || sigma_w_ != o.sigma_w_ || fallback_theta != o.fallback_theta) return false;
    return std::equal(alpha_.begin(), alpha_.end(), o.alpha_.begin(), o.alpha_.end(), [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    });
}

int decide_threshold(const SwitchDecisionInput& in, const ThresholdTable& t, ThresholdMode mode) {
    if (auto forced = budget_override(in.schedule())) return *forced;
    const double s2 = in.s_m * in.s_m;
    if (mode == ThresholdMode::Constant) return s2 >= t.fallback_theta ? 1 : 0;
    // Past the effective horizon a switch cannot reach the controller in time.
    if (in.k >= in.horizon - in.tau) return 0;
    const auto alpha = t.alpha(in.k, in.budget.q_remaining());
    if (!alpha)
        throw ValidationError(ErrorCode::MissingTableEntry, "no threshold for k = " + std::to_string(in.k) +
                                                                ", j = " + std::to_string(in.budget.q_remaining()));
    if (std::isinf(*alpha)) return 0;
    return s2 >= *alpha * t.sigma_w() * t.sigma_w() ? 1 : 0;
}

void write_threshold_table(std::ostream& os, const ThresholdTable& t) {
    csv::write_header(os, {"k", "j", "alpha"});
    for (int k = 0; k < t.effective_horizon(); ++k)
        for (int j = 0; j <= t.q0(); ++j)
            if (auto a = t.alpha(k, j)) csv::write_row(os, {csv::fmt(k), csv::fmt(j), csv::fmt(*a)});
}

ThresholdTable read_threshold_table(std::istream& is, double sigma_w) {
    const csv::Table raw = csv::read(is);
    const std::size_t ck = raw.index("k"), cj = raw.index("j"), ca = raw.index("alpha");
    int kmax = -1, jmax = 0;
    for (const auto& row : raw.rows) {
        kmax = std::max(kmax, static_cast<int>(csv::parse_int(row[ck])));
        jmax = std::max(jmax, static_cast<int>(csv::parse_int(row[cj])));
    }
    ThresholdTable t(kmax + 1, jmax, sigma_w);
    for (const auto& row : raw.rows)
        t.set_alpha(static_cast<int>(csv::parse_int(row[ck])), static_cast<int>(csv::parse_int(row[cj])),
                    csv::parse_double(row[ca]));
    return t;
}

}  // namespace swlqr
