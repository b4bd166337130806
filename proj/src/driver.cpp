#include "aqc/driver.hpp"

#include <chrono>
#include <cmath>

namespace aqc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

std::vector<double> random_angles(Rng& rng, std::size_t n) {
    std::vector<double> angles(n);
    for (double& a : angles) a = rng.uniform(0.0, kTwoPi);
    return angles;
}

class Driver {
public:
    Driver(CostFunction& cost, const TwoStageConfig& cfg, TwoStageState state,
           const DriverHooks& hooks)
        : cost_(cost), cfg_(cfg), state_(std::move(state)), hooks_(hooks),
          run_start_(std::chrono::steady_clock::now()) {
        lbfgs_cfg_.memory = cfg_.lbfgs_memory;
        lbfgs_cfg_.wolfe_c1 = cfg_.wolfe_c1;
        lbfgs_cfg_.wolfe_c2 = cfg_.wolfe_c2;
        record_.best_cost = state_.best_cost;
    }

    TwoStageResult run() {
        while (state_.phase != TwoStageState::Phase::Done &&
               state_.iteration < cfg_.max_iterations) {
            if (!state_.attempt_started) start_attempt();
            if (hooks_.start_hook) hooks_.start_hook(state_);
            iterate();
        }
        finish();
        TwoStageResult result;
        result.angles = state_.best_angles.empty() ? state_.angles : state_.best_angles;
        result.record = std::move(record_);
        result.final_state = std::move(state_);
        return result;
    }

private:
    void start_attempt() {
        if (state_.attempt > 0 || state_.angles.empty())
            state_.angles = random_angles(state_.rng, cost_.n_params());
        state_.adam = AdamState(cost_.n_params(), cfg_.adam);
        state_.lbfgs = LbfgsMemory{};
        state_.schedule.w = 1.0;
        state_.surrogate = SurrogateState{};
        state_.phase = TwoStageState::Phase::Adam;
        state_.stage_iteration = 0;
        state_.stall_ref = std::numeric_limits<double>::infinity();
        state_.stall_count = 0;
        state_.attempt_started = true;
    }

    /// Evaluates the frozen per-iteration objective at the current angles.
    GradientReport evaluate() {
        cost_.set_weight_scale(state_.schedule.w);
        cost_.set_surrogate(state_.surrogate);
        cost_.refresh_surrogate(state_.angles);
        state_.surrogate = cost_.surrogate();
        return cost_.value_and_gradient(state_.angles);
    }

    Objective frozen_objective() {
        return [this](std::span<const double> x, std::span<double> grad) {
            GradientReport rep = cost_.value_and_gradient(x);
            std::copy(rep.gradient.begin(), rep.gradient.end(), grad.begin());
            return rep.cost;
        };
    }

    void iterate() {
        GradientReport rep = evaluate();
        double gn = norm2(rep.gradient);

        RunRow row;
        row.iteration = state_.iteration;
        row.cost = rep.cost;
        row.weight = state_.schedule.w;
        row.grad_norm = gn;
        row.fidelity = hooks_.fidelity ? hooks_.fidelity(state_.angles)
                                       : cost_.last_stats().fidelity;
        if (cost_.last_stats().surrogate_degenerate) ++state_.degenerate_events;
        // Wall-clock stamp since the run (or resume) began; the previous
        // iteration's line search is included in the delta between rows.
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - run_start_)
                          .count();
        record_.rows.push_back(row);
        if (hooks_.sink) hooks_.sink(row);

        if (rep.cost < state_.best_cost) {
            state_.best_cost = rep.cost;
            state_.best_angles = state_.angles;
        }
        state_.iteration += 1;

        if (rep.cost <= cfg_.success_cost || gn <= cfg_.grad_tolerance) {
            state_.converged = true;
            state_.phase = TwoStageState::Phase::Done;
            return;
        }

        // Stall bookkeeping over the active attempt.
        if (state_.stall_ref - rep.cost < cfg_.stall_eps) {
            if (++state_.stall_count >= cfg_.stall_window) {
                end_attempt(true);
                return;
            }
        } else {
            state_.stall_count = 0;
            state_.stall_ref = rep.cost;
        }

        double cost_for_schedule = rep.cost;

        if (state_.phase == TwoStageState::Phase::Adam) {
            bool handoff = rep.cost < cfg_.stage_threshold ||
                           state_.stage_iteration + 1 >= cfg_.adam_iterations;
            if (handoff) {
                state_.phase = TwoStageState::Phase::Lbfgs;
                state_.stage_iteration = 0;
                state_.lbfgs = LbfgsMemory{};
                LbfgsStepper stepper(lbfgs_cfg_);
                stepper.set_state(state_.angles, rep.cost, rep.gradient);
                bool ok = stepper.step(frozen_objective());
                state_.lbfgs = stepper.memory();
                if (!ok) {
                    end_attempt(true);
                    return;
                }
                state_.angles = state_.lbfgs.x;
            } else {
                adam_step(state_.adam, rep.gradient, state_.angles);
                state_.stage_iteration += 1;
            }
        } else {
            LbfgsStepper stepper(lbfgs_cfg_);
            stepper.memory() = std::move(state_.lbfgs);
            stepper.set_state(state_.angles, rep.cost, rep.gradient);
            bool ok = stepper.step(frozen_objective());
            state_.lbfgs = std::move(stepper.memory());
            if (!ok) {
                end_attempt(true);
                return;
            }
            state_.angles = state_.lbfgs.x;
            state_.stage_iteration += 1;
        }

        update_weight(state_.schedule, std::min(cost_for_schedule, 1.0));
    }

    void end_attempt(bool stalled) {
        if (stalled) state_.stalled = true;
        state_.attempt += 1;
        state_.attempt_started = false;
        if (state_.attempt >= cfg_.restarts) state_.phase = TwoStageState::Phase::Done;
    }

    void finish() {
        record_.best_cost = state_.best_cost;
        record_.final_cost =
            record_.rows.empty() ? state_.best_cost : record_.rows.back().cost;
        record_.stalled = state_.stalled && !state_.converged;
        record_.degenerate_surrogate_events = state_.degenerate_events;
        if (!state_.best_angles.empty()) {
            // Fidelity is schedule-independent, so report it at the returned
            // angles.
            if (hooks_.fidelity) {
                record_.final_fidelity = hooks_.fidelity(state_.best_angles);
            } else {
                cost_.value(state_.best_angles);
                record_.final_fidelity = cost_.last_stats().fidelity;
            }
        }
        state_.phase = TwoStageState::Phase::Done;
    }

    CostFunction& cost_;
    const TwoStageConfig& cfg_;
    TwoStageState state_;
    DriverHooks hooks_;
    LbfgsConfig lbfgs_cfg_;
    RunRecord record_;
    std::chrono::steady_clock::time_point run_start_;
};

}  // namespace

TwoStageResult two_stage_run(CostFunction& cost, const TwoStageConfig& cfg,
                             WeightSchedule schedule, std::uint64_t seed,
                             std::optional<std::vector<double>> initial_angles,
                             const DriverHooks& hooks) {
    TwoStageState state;
    state.schedule = schedule;
    state.rng = Rng(seed);
    if (initial_angles) {
        if (initial_angles->size() != cost.n_params())
            throw std::invalid_argument("initial angles length mismatch");
        state.angles = std::move(*initial_angles);
    }
    Driver driver(cost, cfg, std::move(state), hooks);
    return driver.run();
}

TwoStageResult two_stage_continue(CostFunction& cost, const TwoStageConfig& cfg,
                                  TwoStageState state, const DriverHooks& hooks) {
    Driver driver(cost, cfg, std::move(state), hooks);
    return driver.run();
}

}  // namespace aqc
