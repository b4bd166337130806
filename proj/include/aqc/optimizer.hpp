#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqc/rng.hpp"

namespace aqc {

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    std::vector<double> m, v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n = 0, AdamConfig c = {})
        : cfg(c), m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update, in place. Throws on non-finite gradients.
void adam_step(AdamState& state, std::span<const double> gradient,
               std::vector<double>& angles);

struct LbfgsConfig {
    std::size_t memory = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    std::size_t max_iterations = 1000;
    double grad_tolerance = 1e-12;
    double cost_tolerance = 0.0;  // stop when the cost itself falls below this
    std::size_t stall_window = 50;
    double stall_eps = 1e-10;
    std::size_t max_line_search_steps = 40;
};

/// Objective: writes the gradient into `grad` and returns the cost.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Called once per accepted iterate; return false to stop.
using IterationHook =
    std::function<bool(std::size_t iter, std::span<const double> x, double cost,
                       double grad_norm)>;

struct LbfgsResult {
    std::vector<double> best_x;
    double best_cost = 0.0;
    std::size_t iterations = 0;
    bool stalled = false;     // line-search failure or no measurable progress
    bool converged = false;   // gradient or cost tolerance met
};

/// Limited-memory BFGS with a strong-Wolfe line search. Line-search failure is
/// surfaced through `stalled`, never hidden; the best-seen iterate is returned
/// either way.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& cfg, const IterationHook& hook = {});

/// Serializable internals of an in-flight L-BFGS loop (checkpointing).
struct LbfgsMemory {
    std::deque<std::vector<double>> s_list, y_list;
    std::deque<double> rho_list;
    std::vector<double> x, grad;
    double cost = 0.0;
    std::size_t iter = 0;
    std::size_t stall_count = 0;
    double stall_ref_cost = 0.0;
    bool primed = false;
};

/// One-outer-iteration-at-a-time L-BFGS, so a driver can interleave weight
/// updates and checkpoints between steps. The objective passed to step() must
/// stay fixed for the duration of that call; when the driver's objective
/// drifts between iterations it re-evaluates and calls set_state().
class LbfgsStepper {
public:
    explicit LbfgsStepper(LbfgsConfig cfg = {});

    void prime(const Objective& objective, const std::vector<double>& x);
    void set_state(std::vector<double> x, double cost, std::vector<double> grad);
    void reset_memory();

    double grad_norm() const;
    std::vector<double> direction() const;

    /// Direction + strong-Wolfe line search + curvature update. Returns false
    /// when no acceptable step exists; the state is untouched in that case.
    bool step(const Objective& objective);

    LbfgsMemory& memory() { return mem_; }
    const LbfgsMemory& memory() const { return mem_; }
    const LbfgsConfig& config() const { return cfg_; }

private:
    LbfgsConfig cfg_;
    LbfgsMemory mem_;
};

struct WeightSchedule {
    enum class Mode { None, SqrtCost, Ema };
    Mode mode = Mode::Ema;
    double w = 1.0;
    double ema_mix = 0.1;
    double ema_keep = 0.9;
};

const char* schedule_mode_name(WeightSchedule::Mode mode);

/// sqrt mode: w <- sqrt(cost). ema mode: w <- mix*sqrt(cost) + keep*w.
/// w is clamped to [0, 1]; costs below -1e-12 are rejected.
void update_weight(WeightSchedule& schedule, double cost);

struct TwoStageConfig {
    double stage_threshold = 0.9;  // Adam hands off below this cost
    std::size_t max_iterations = 3000;     // total, across stages and restarts
    std::size_t adam_iterations = 1000;    // stage-1 budget per attempt
    std::size_t restarts = 1;              // attempts, fresh random init each
    double success_cost = 1e-10;           // stop once the cost falls this low
    double grad_tolerance = 1e-12;
    std::size_t stall_window = 50;
    double stall_eps = 1e-10;
    AdamConfig adam;
    std::size_t lbfgs_memory = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
};

struct RunRow {
    std::uint64_t iteration = 0;
    double cost = 0.0;
    double weight = 1.0;
    double grad_norm = 0.0;
    std::optional<double> fidelity;
    double wall_ms = 0.0;
};

struct RunRecord {
    std::vector<RunRow> rows;
    double best_cost = 0.0;
    double final_cost = 0.0;
    std::optional<double> final_fidelity;
    bool stalled = false;
    std::uint64_t degenerate_surrogate_events = 0;
    std::string weight_scaling;  // how the schedule scale maps onto the weights
};

}  // namespace aqc
