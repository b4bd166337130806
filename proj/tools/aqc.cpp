// Command-line front end: every experiment family is a subcommand over a
// config file, with seed / output / threading overrides.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "aqc/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string resume_path;
    std::int64_t seed = -1;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool resumable) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--out-dir", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--threads", args.threads,
                    "worker threads (overrides config and AQC_THREADS)");
    if (resumable)
        cmd->add_option("--resume", args.resume_path, "checkpoint file to resume from");
}

int run(aqc::RunMode mode, const CommonArgs& args) {
    aqc::ExperimentConfig config = aqc::parse_config_file(args.config_path);
    if (config.mode != mode)
        throw aqc::ConfigError(std::string("config mode '") + aqc::run_mode_name(config.mode) +
                               "' does not match the subcommand");
    if (args.seed >= 0) {
        config.seed = static_cast<std::uint64_t>(args.seed);
        config.seed_set = true;
    }
    if (!args.out_dir.empty()) config.output.dir = args.out_dir;
    if (args.threads > 0) {
        config.threads = args.threads;
    } else if (const char* env = std::getenv("AQC_THREADS")) {
        unsigned n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        if (n > 0) config.threads = n;
    }

    aqc::ExperimentResult result;
    if (!args.resume_path.empty())
        result = aqc::resume_experiment(config, args.resume_path);
    else
        result = aqc::run_experiment(config);

    switch (mode) {
    case aqc::RunMode::CompileState:
    case aqc::RunMode::CompileUnitary:
        std::printf("rows %zu  best cost %.6e", result.record.rows.size(),
                    result.record.best_cost);
        if (result.record.final_fidelity)
            std::printf("  fidelity %.8f", *result.record.final_fidelity);
        if (result.trotter_baseline_fidelity)
            std::printf("  trotter baseline %.8f", *result.trotter_baseline_fidelity);
        if (result.record.stalled) std::printf("  [stalled]");
        std::printf("\n");
        break;
    case aqc::RunMode::VarianceScan:
        for (const auto& p : result.variance)
            std::printf("n=%zu  variance %.6e  stderr %.2e\n", p.n, p.variance,
                        p.variance_stderr);
        break;
    case aqc::RunMode::TrotterBenchmark:
        for (const auto& row : result.trotter_rows)
            std::printf("dt=%.4f  step error %.6e\n", row.dt, row.single_step_error);
        std::printf("error slope %.4f  fidelity(%zu steps) %.8f\n",
                    result.trotter_error_slope, result.record.rows.size(),
                    result.trotter_run_fidelity);
        break;
    }
    std::printf("artifacts in %s\n", result.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate quantum compiling toolkit"};
    app.require_subcommand(1);

    CommonArgs state_args, unitary_args, scan_args, bench_args;
    CLI::App* state = app.add_subcommand("compile-state", "approximate state preparation");
    add_common(state, state_args, true);
    CLI::App* unitary = app.add_subcommand("compile-unitary", "approximate circuit compilation");
    add_common(unitary, unitary_args, true);
    CLI::App* scan = app.add_subcommand("variance-scan", "gradient variance scaling scan");
    add_common(scan, scan_args, false);
    CLI::App* bench = app.add_subcommand("trotter-benchmark", "trotter error and fidelity");
    add_common(bench, bench_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (state->parsed()) return run(aqc::RunMode::CompileState, state_args);
        if (unitary->parsed()) return run(aqc::RunMode::CompileUnitary, unitary_args);
        if (scan->parsed()) return run(aqc::RunMode::VarianceScan, scan_args);
        if (bench->parsed()) return run(aqc::RunMode::TrotterBenchmark, bench_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
