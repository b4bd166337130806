#include "aqc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqc/parallel.hpp"

namespace aqc {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

FlipWeights resolve_weights(const CostConfig& cost, std::size_t n) {
    const std::size_t k = cost.k;
    CostConfig::WeightRule rule = cost.weight_rule;
    bool unitary = cost.kind == CostConfig::Kind::UnitaryLocal;
    if (rule == CostConfig::WeightRule::Default) {
        // Scheduled single-alpha for first order, solved ratios above it;
        // matrix costs default to the locality pattern.
        if (unitary)
            rule = CostConfig::WeightRule::UniformLocality;
        else
            rule = (k == 1) ? CostConfig::WeightRule::Unit
                            : CostConfig::WeightRule::Telescoping;
    }
    switch (rule) {
    case CostConfig::WeightRule::Unit: {
        FlipWeights w;
        w.k = k;
        w.alphas.assign(k, 1.0);
        return w;
    }
    case CostConfig::WeightRule::Telescoping:
        return FlipWeights::telescoping(n, k);
    case CostConfig::WeightRule::UniformLocality:
        return FlipWeights::uniform_locality(n, k);
    case CostConfig::WeightRule::Explicit: {
        FlipWeights w;
        w.k = k;
        w.alphas = cost.alphas;
        w.validate(n);
        return w;
    }
    default:
        throw std::logic_error("unresolved weight rule");
    }
}

std::string weight_scaling_label(const CostConfig& cost) {
    if (cost.schedule == WeightSchedule::Mode::None) return "static";
    switch (cost.kind) {
    case CostConfig::Kind::TruncatedLocal:
    case CostConfig::Kind::UnitaryLocal:
        return cost.k == 1 ? "single-alpha" : "joint-scaled-base-weights";
    case CostConfig::Kind::LocalFull:
        return "joint-scaled-base-weights";
    case CostConfig::Kind::SurrogateComposite:
    case CostConfig::Kind::SurrogateMax:
        return "surrogate-alpha";
    default:
        return "static";
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << text;
}

ParamCircuit freeze_circuit(const ParamCircuit& ansatz, std::span<const double> angles) {
    ParamCircuit frozen;
    frozen.n_qubits = ansatz.n_qubits;
    frozen.n_params = 0;
    for (const auto& g : ansatz.gates) {
        if (const auto* rot = std::get_if<RotationGate>(&g)) {
            RotationGate fixed = *rot;
            if (fixed.slot) {
                fixed.fixed_angle = angles[*fixed.slot];
                fixed.slot.reset();
            }
            frozen.gates.push_back(fixed);
        } else {
            frozen.gates.push_back(g);
        }
    }
    return frozen;
}

}  // namespace

CompileProblem build_compile_problem(const ExperimentConfig& config) {
    CompileProblem problem;
    problem.ansatz = build_layered_ansatz(config.ansatz.to_spec());
    Rng master(config.seed);

    // Target construction consumes the master stream first; the driver gets an
    // independent substream so resume never needs to replay target draws.
    if (config.mode == RunMode::CompileState) {
        switch (config.target.kind) {
        case TargetConfig::Kind::RandomAnsatzState: {
            std::vector<double> generator(problem.ansatz.n_params);
            for (double& a : generator) a = master.uniform(0.0, kTwoPi);
            StateVector target = StateVector::zero_state(problem.ansatz.n_qubits);
            apply_circuit(target, bind_parameters(problem.ansatz, generator));
            problem.target_state = std::move(target);
            break;
        }
        case TargetConfig::Kind::File: {
            std::ifstream in(config.target.path, std::ios::binary);
            if (!in)
                throw std::runtime_error("cannot read target state '" + config.target.path + "'");
            problem.target_state = read_state(in);
            if (problem.target_state->n_qubits != problem.ansatz.n_qubits)
                throw std::invalid_argument("target state qubit count does not match ansatz");
            break;
        }
        default:
            throw std::logic_error("state mode with non-state target");
        }
    } else {
        switch (config.target.kind) {
        case TargetConfig::Kind::Trotter: {
            SpinChainSpec chain{config.target.sites};
            TrotterPlan plan{config.target.dt, config.target.steps, 1};
            problem.target_unitary = circuit_unitary(trotter_circuit(chain, plan));
            problem.exact = exact_evolution(chain, config.target.evolution_time());
            break;
        }
        case TargetConfig::Kind::File: {
            std::ifstream in(config.target.path, std::ios::binary);
            if (!in)
                throw std::runtime_error("cannot read target unitary '" + config.target.path + "'");
            problem.target_unitary = read_unitary(in);
            if (problem.target_unitary->dim != (std::size_t{1} << problem.ansatz.n_qubits))
                throw std::invalid_argument("target unitary dimension does not match ansatz");
            break;
        }
        default:
            throw std::logic_error("unitary mode with non-matrix target");
        }
    }

    const std::size_t n = problem.ansatz.n_qubits;
    CostSpec& spec = problem.cost_spec;
    switch (config.cost.kind) {
    case CostConfig::Kind::Global:
        spec.kind = CostKind::StateGlobal;
        break;
    case CostConfig::Kind::LocalFull:
        spec.kind = CostKind::StateLocal;
        spec.weights = FlipWeights::uniform_locality(n, n - 1);
        break;
    case CostConfig::Kind::TruncatedLocal:
        spec.kind = CostKind::StateLocal;
        spec.weights = resolve_weights(config.cost, n);
        break;
    case CostConfig::Kind::SurrogateComposite:
        spec.kind = CostKind::SurrogateComposite;
        spec.alpha = config.cost.alpha;
        break;
    case CostConfig::Kind::SurrogateMax:
        spec.kind = CostKind::SurrogateMax;
        spec.alpha = config.cost.alpha;
        break;
    case CostConfig::Kind::UnitaryHs:
        spec.kind = CostKind::UnitaryHs;
        break;
    case CostConfig::Kind::UnitaryLocal:
        spec.kind = CostKind::UnitaryLocal;
        spec.weights = resolve_weights(config.cost, n);
        break;
    }

    problem.schedule.mode = config.cost.schedule;
    problem.schedule.w = 1.0;
    problem.weight_scaling = weight_scaling_label(config.cost);
    problem.driver_seed = master.next_u64();
    return problem;
}

namespace {

struct CompileContext {
    CompileProblem problem;
    ArtifactInfo info;
    fs::path dir;
    std::uint64_t hash = 0;
};

CostFunction make_cost_function(const CompileProblem& problem, const CostSpec& spec) {
    if (problem.target_state)
        return CostFunction(problem.ansatz, *problem.target_state, spec);
    return CostFunction(problem.ansatz, *problem.target_unitary, spec);
}

DriverHooks make_hooks(const ExperimentConfig& config, const CompileContext& ctx,
                       const std::optional<DenseUnitary>& exact, bool checkpoints) {
    DriverHooks hooks;
    if (exact) {
        const DenseUnitary* exact_ptr = &*exact;
        const ParamCircuit* ansatz = &ctx.problem.ansatz;
        hooks.fidelity = [exact_ptr, ansatz](std::span<const double> angles) {
            DenseUnitary v = circuit_unitary(bind_parameters(*ansatz, angles));
            return average_gate_fidelity(v, *exact_ptr);
        };
    }
    if (checkpoints && config.output.checkpoint_every > 0) {
        std::uint64_t every = config.output.checkpoint_every;
        fs::path dir = ctx.dir;
        std::uint64_t hash = ctx.hash;
        hooks.start_hook = [every, dir, hash](const TwoStageState& state) {
            if (state.iteration % every != 0) return;
            char name[48];
            std::snprintf(name, sizeof(name), "checkpoint_%09llu.bin",
                          static_cast<unsigned long long>(state.iteration));
            Checkpoint cp;
            cp.config_hash = hash;
            cp.version = kVersion;
            cp.state = state;
            write_checkpoint((dir / name).string(), cp);
        };
    }
    return hooks;
}

void write_compile_artifacts(const ExperimentConfig& config, const CompileContext& ctx,
                             const TwoStageResult& result,
                             const std::optional<RunRecord>& twin,
                             std::optional<double> baseline) {
    const fs::path& dir = ctx.dir;
    {
        std::ofstream csv(dir / "run.csv");
        write_record_csv(csv, result.record, ctx.info);
    }
    {
        std::ofstream jsonl(dir / "run.jsonl");
        write_record_jsonl(jsonl, result.record, ctx.info);
    }
    {
        nlohmann::json doc = nlohmann::json::parse(record_summary_json(result.record, ctx.info));
        doc["mode"] = run_mode_name(config.mode);
        doc["seed"] = config.seed;
        doc["weight_scaling"] = ctx.problem.weight_scaling;
        if (baseline) doc["trotter_baseline_fidelity"] = *baseline;
        if (config.target.kind == TargetConfig::Kind::Trotter) {
            doc["chain_boundary"] = "open";
            doc["chain_bond_terms"] = config.target.sites - 1;
            doc["evolution_time"] = config.target.evolution_time();
        }
        doc["final_angles"] = result.angles;
        write_text_file(dir / "summary.json", doc.dump(2) + "\n");
    }
    write_text_file(dir / "ansatz.json", circuit_to_json(ctx.problem.ansatz) + "\n");
    write_text_file(dir / "final_circuit.json",
                    circuit_to_json(freeze_circuit(ctx.problem.ansatz, result.angles)) + "\n");

    if (twin) {
        std::ofstream csv(dir / "run_global.csv");
        write_record_csv(csv, *twin, ctx.info);
        std::ofstream cmp(dir / "comparison.csv");
        write_comparison_csv(cmp, result.record, "main", *twin, "global", ctx.info);
    }

    if (config.output.dump_state && ctx.problem.target_state) {
        {
            std::ofstream os(dir / "target_state.bin", std::ios::binary);
            write_state(os, *ctx.problem.target_state);
        }
        StateVector compiled = StateVector::zero_state(ctx.problem.ansatz.n_qubits);
        apply_circuit(compiled, bind_parameters(ctx.problem.ansatz, result.angles));
        std::ofstream os(dir / "compiled_state.bin", std::ios::binary);
        write_state(os, compiled);
    }
    if (config.output.dump_unitary && ctx.problem.target_unitary) {
        std::ofstream os(dir / "target_unitary.bin", std::ios::binary);
        write_unitary(os, *ctx.problem.target_unitary);
    }
    if (config.output.dump_unitary && !ctx.problem.target_state) {
        DenseUnitary compiled =
            circuit_unitary(bind_parameters(ctx.problem.ansatz, result.angles));
        std::ofstream os(dir / "compiled_unitary.bin", std::ios::binary);
        write_unitary(os, compiled);
    }
}

ExperimentResult run_compile(const ExperimentConfig& config,
                             std::optional<TwoStageState> resume_state) {
    CompileContext ctx;
    ctx.problem = build_compile_problem(config);
    ctx.hash = config_hash(config);
    ctx.info = ArtifactInfo{kVersion, hash_hex(ctx.hash)};
    ctx.dir = config.output.dir;
    fs::create_directories(ctx.dir);

    std::optional<double> baseline;
    if (ctx.problem.exact)
        baseline = average_gate_fidelity(*ctx.problem.target_unitary, *ctx.problem.exact);

    CostFunction cost = make_cost_function(ctx.problem, ctx.problem.cost_spec);
    DriverHooks hooks = make_hooks(config, ctx, ctx.problem.exact, true);

    TwoStageResult result;
    if (resume_state) {
        result = two_stage_continue(cost, config.optimizer, std::move(*resume_state), hooks);
    } else {
        result = two_stage_run(cost, config.optimizer, ctx.problem.schedule,
                               ctx.problem.driver_seed, std::nullopt, hooks);
    }
    result.record.weight_scaling = ctx.problem.weight_scaling;

    std::optional<RunRecord> twin;
    if (config.output.twin_global && !resume_state) {
        CostSpec global_spec;
        global_spec.kind = ctx.problem.target_state ? CostKind::StateGlobal
                                                    : CostKind::UnitaryHs;
        CostFunction twin_cost = make_cost_function(ctx.problem, global_spec);
        WeightSchedule none;
        none.mode = WeightSchedule::Mode::None;
        DriverHooks twin_hooks = make_hooks(config, ctx, ctx.problem.exact, false);
        TwoStageResult twin_result = two_stage_run(twin_cost, config.optimizer, none,
                                                   ctx.problem.driver_seed, std::nullopt,
                                                   twin_hooks);
        twin_result.record.weight_scaling = "static";
        twin = std::move(twin_result.record);
    }

    write_compile_artifacts(config, ctx, result, twin, baseline);

    ExperimentResult out;
    out.record = std::move(result.record);
    out.twin_record = std::move(twin);
    out.final_angles = std::move(result.angles);
    out.trotter_baseline_fidelity = baseline;
    out.out_dir = ctx.dir.string();
    return out;
}

ExperimentResult run_variance(const ExperimentConfig& config) {
    VarianceScan scan;
    scan.qubit_counts = config.scan.qubits;
    scan.samples = config.scan.samples;
    scan.seed = config.seed;
    scan.component = config.scan.component;
    scan.jackknife_blocks = config.scan.blocks;
    switch (config.scan.cost) {
    case CostConfig::Kind::Global:
        scan.cost = VarianceScan::Cost::Global;
        break;
    case CostConfig::Kind::LocalFull:
        scan.cost = VarianceScan::Cost::LocalFull;
        break;
    default:
        scan.cost = VarianceScan::Cost::Truncated;
        scan.truncation = config.scan.k;
        scan.weight_rule = config.scan.weight_rule == CostConfig::WeightRule::UniformLocality
                               ? VarianceScan::WeightRule::UniformLocality
                               : VarianceScan::WeightRule::Telescoping;
        break;
    }

    ExperimentResult out;
    out.variance = estimate_gradient_variance(scan);

    std::uint64_t hash = config_hash(config);
    ArtifactInfo info{kVersion, hash_hex(hash)};
    fs::path dir = config.output.dir;
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "variance.csv");
        csv << "# aqc " << info.version << " config_hash=" << info.config_hash << "\n";
        write_variance_csv(csv, scan, out.variance);
    }
    {
        nlohmann::json doc;
        doc["version"] = info.version;
        doc["config_hash"] = info.config_hash;
        doc["mode"] = run_mode_name(config.mode);
        doc["seed"] = config.seed;
        doc["cost"] = scan.cost_name();
        if (out.variance.size() >= 2) {
            LogFit fit = fit_log_variance(out.variance);
            doc["log_fit_slope"] = fit.slope;
            doc["log_fit_intercept"] = fit.intercept;
        }
        write_text_file(dir / "summary.json", doc.dump(2) + "\n");
    }
    out.out_dir = dir.string();
    return out;
}

ExperimentResult run_trotter_benchmark(const ExperimentConfig& config) {
    SpinChainSpec chain{config.benchmark.sites};
    ExperimentResult out;

    for (double dt : config.benchmark.dts) {
        DenseUnitary step = circuit_unitary(trotter_step_circuit(chain, dt));
        DenseUnitary exact = exact_evolution(chain, dt);
        out.trotter_rows.push_back({dt, phase_aligned_distance(step, exact)});
    }
    if (out.trotter_rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& row : out.trotter_rows) {
            double x = std::log(row.dt), y = std::log(row.single_step_error);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double m = static_cast<double>(out.trotter_rows.size());
        out.trotter_error_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    {
        TrotterPlan plan{config.benchmark.dt, config.benchmark.steps, 1};
        DenseUnitary repeated = circuit_unitary(trotter_circuit(chain, plan));
        DenseUnitary exact = exact_evolution(
            chain, config.benchmark.dt * static_cast<double>(config.benchmark.steps));
        out.trotter_run_fidelity = average_gate_fidelity(repeated, exact);
    }

    std::uint64_t hash = config_hash(config);
    ArtifactInfo info{kVersion, hash_hex(hash)};
    fs::path dir = config.output.dir;
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "trotter.csv");
        csv << "# aqc " << info.version << " config_hash=" << info.config_hash << "\n";
        csv << "dt,single_step_error\n";
        for (const auto& row : out.trotter_rows)
            csv << format_double(row.dt) << ',' << format_double(row.single_step_error)
                << '\n';
    }
    {
        nlohmann::json doc;
        doc["version"] = info.version;
        doc["config_hash"] = info.config_hash;
        doc["mode"] = run_mode_name(config.mode);
        doc["sites"] = config.benchmark.sites;
        doc["chain_boundary"] = "open";
        doc["chain_bond_terms"] = config.benchmark.sites - 1;
        doc["error_slope"] = out.trotter_error_slope;
        doc["steps"] = config.benchmark.steps;
        doc["dt"] = config.benchmark.dt;
        doc["fidelity"] = out.trotter_run_fidelity;
        write_text_file(dir / "summary.json", doc.dump(2) + "\n");
    }
    out.out_dir = dir.string();
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    set_thread_count(config.threads);
    switch (config.mode) {
    case RunMode::CompileState:
    case RunMode::CompileUnitary:
        return run_compile(config, std::nullopt);
    case RunMode::VarianceScan:
        return run_variance(config);
    default:
        return run_trotter_benchmark(config);
    }
}

ExperimentResult resume_experiment(const ExperimentConfig& config,
                                   const std::string& checkpoint_path) {
    if (config.mode != RunMode::CompileState && config.mode != RunMode::CompileUnitary)
        throw std::invalid_argument("only compile runs can resume from a checkpoint");
    Checkpoint cp = read_checkpoint(checkpoint_path);
    std::uint64_t expected = config_hash(config);
    if (cp.config_hash != expected)
        throw std::runtime_error(
            "checkpoint config hash " + hash_hex(cp.config_hash) +
            " does not match this config (" + hash_hex(expected) + "); refusing to resume");
    set_thread_count(config.threads);
    return run_compile(config, std::move(cp.state));
}

}  // namespace aqc
