#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "aqc/gradient.hpp"
#include "aqc/optimizer.hpp"
#include "aqc/rng.hpp"

namespace aqc {

/// Complete resumable state of a two-stage optimization. A checkpoint taken at
/// an iteration boundary restores the run bit-for-bit.
struct TwoStageState {
    enum class Phase : std::uint8_t { Adam, Lbfgs, Done };

    Phase phase = Phase::Adam;
    std::size_t attempt = 0;
    std::uint64_t iteration = 0;   // global row counter
    std::size_t stage_iteration = 0;
    std::vector<double> angles;
    AdamState adam;
    LbfgsMemory lbfgs;
    WeightSchedule schedule;
    SurrogateState surrogate;
    Rng rng;
    std::vector<double> best_angles;
    double best_cost = std::numeric_limits<double>::infinity();
    bool stalled = false;
    bool converged = false;
    std::uint64_t degenerate_events = 0;
    double stall_ref = std::numeric_limits<double>::infinity();
    std::size_t stall_count = 0;
    bool attempt_started = false;
};

struct TwoStageResult {
    std::vector<double> angles;  // best-seen
    RunRecord record;
    TwoStageState final_state;
};

using RowSink = std::function<void(const RunRow&)>;

/// Called at the top of every iteration, before any evaluation; checkpoints
/// written here resume exactly.
using IterationStartHook = std::function<void(const TwoStageState&)>;

/// Replaces the row fidelity with a caller-computed figure (e.g. fidelity
/// against an exact evolution rather than against the compile target). Must be
/// a pure function of the angles.
using FidelityFn = std::function<double(std::span<const double>)>;

struct DriverHooks {
    RowSink sink;
    IterationStartHook start_hook;
    FidelityFn fidelity;
};

/// Adam reduces the cost to the stage threshold (or exhausts its budget),
/// then L-BFGS continues; the weight schedule advances once per iteration and
/// rescales the flip or surrogate term. Fresh attempts draw uniform angles
/// from the driver RNG.
TwoStageResult two_stage_run(CostFunction& cost, const TwoStageConfig& cfg,
                             WeightSchedule schedule, std::uint64_t seed,
                             std::optional<std::vector<double>> initial_angles = {},
                             const DriverHooks& hooks = {});

/// Continues from a restored state (checkpoint resume).
TwoStageResult two_stage_continue(CostFunction& cost, const TwoStageConfig& cfg,
                                  TwoStageState state, const DriverHooks& hooks = {});

}  // namespace aqc
