#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swlqr/engine.hpp"
#include "swlqr/scenario.hpp"

namespace swlqr {

// Exit codes: 0 success, 2 validation error (including bad flags), 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// The policy matrix for one plant and noise law, filtered by the scenario. Calibrates
// θ and γ and solves the threshold table only when a selected policy needs them.
struct PolicyMatrix {
    std::vector<PolicySpec> policies;
    std::optional<double> theta;
    std::optional<double> gamma;
};
PolicyMatrix build_policy_matrix(const Scenario& s, const SystemParams& p, const NoiseModel& noise);

// Every label the full matrix can produce, in output order.
const std::vector<std::string>& policy_labels();

void write_runstats_csv(std::ostream& os, const std::vector<RunStats>& stats);
void write_summary_csv(std::ostream& os, const std::vector<RunStats>& stats);

struct SweepRow {
    double axis_value = 0.0;
    std::string policy;
    NoiseKind noise = NoiseKind::Gaussian;
    double steady_cost = 0.0;
    double ci = 0.0;
    double diverged_fraction = 0.0;
    double normalized_diff = 0.0;  // (cost − cost_gaussian) / cost_gaussian; NaN without a baseline
    double normalized_diff_ci = 0.0;
};
std::vector<SweepRow> run_sweep(const Scenario& s);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace swlqr
