#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqc/checkpoint.hpp"
#include "aqc/config.hpp"
#include "aqc/driver.hpp"
#include "aqc/run_record.hpp"
#include "aqc/trotter.hpp"
#include "aqc/variance.hpp"

namespace aqc {

struct TrotterBenchRow {
    double dt = 0.0;
    double single_step_error = 0.0;  // phase-aligned Frobenius vs exact(dt)
};

struct ExperimentResult {
    RunRecord record;
    std::optional<RunRecord> twin_record;  // global-cost twin when requested
    std::vector<double> final_angles;
    std::optional<double> trotter_baseline_fidelity;
    std::vector<VariancePoint> variance;
    std::vector<TrotterBenchRow> trotter_rows;
    double trotter_error_slope = 0.0;
    double trotter_run_fidelity = 0.0;  // U_trot^steps vs exact(steps*dt)
    std::string out_dir;
};

/// Builds the problem named by the config, runs it, and writes every artifact
/// (CSV, JSON-lines, summary, circuit JSON, dumps, checkpoints) under
/// config.output.dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Resumes a compile run from a checkpoint. Refuses checkpoints whose config
/// hash differs from `config`. The emitted record holds only the resumed tail.
ExperimentResult resume_experiment(const ExperimentConfig& config,
                                   const std::string& checkpoint_path);

/// The problem a compile config describes, reproducible from (config, seed).
struct CompileProblem {
    ParamCircuit ansatz;
    std::optional<StateVector> target_state;
    std::optional<DenseUnitary> target_unitary;
    std::optional<DenseUnitary> exact;  // trotter targets only
    CostSpec cost_spec;
    WeightSchedule schedule;
    std::string weight_scaling;
    std::uint64_t driver_seed = 0;
};

CompileProblem build_compile_problem(const ExperimentConfig& config);

}  // namespace aqc
