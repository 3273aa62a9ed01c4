#pragma once

#include <cstddef>
#include <vector>

namespace swlqr {

// Scalar plant X_{k+1} = a X_k + b U_k + W_k observed through a τ-step delay,
// with stage cost q X² + r U² and at most floor(N r_s) switches over N steps.
struct SystemParams {
    double a = 1.0;
    double b = 1.0;
    double q = 1.0;
    double r = 1.0;
    double sigma_w = 10.0;
    int tau = 1;
    double rate = 0.4;
    int horizon = 100;

    bool operator==(const SystemParams&) const = default;
};

// Returns p unchanged or throws ValidationError.
SystemParams validate_params(const SystemParams& p);

// Q_0 = floor(N r_s); the epsilon absorbs products such as 100 * 0.29.
int initial_budget(const SystemParams& p);

// K = N - τ: decisions at k >= K never reach the controller before the horizon.
inline int effective_horizon(const SystemParams& p) { return p.horizon - p.tau; }

double ipow(double x, int n);

class BudgetState {
public:
    explicit BudgetState(int q0 = 0) : q_remaining_(q0), switches_used_(0) {}

    int q_remaining() const { return q_remaining_; }
    int switches_used() const { return switches_used_; }
    bool exhausted() const { return q_remaining_ <= 0; }

    // Throws ValidationError if d = 1 with nothing left.
    void consume(int d);

private:
    int q_remaining_;
    int switches_used_;
};

struct PipelineEntry {
    int decision = 0;
    double state = 0.0;
};

// Fixed-length FIFO: the entry emitted at step k is the one pushed at k - τ.
class DelayPipeline {
public:
    explicit DelayPipeline(int tau);

    // Pre-filled as if a switch carried X = 0 at k = -τ and nothing after.
    static DelayPipeline bootstrap(int tau);

    PipelineEntry push(PipelineEntry in);
    int delay() const { return static_cast<int>(slots_.size()); }

private:
    std::vector<PipelineEntry> slots_;
    std::size_t head_ = 0;
};

}  // namespace swlqr
