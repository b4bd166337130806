#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqc/circuit.hpp"
#include "aqc/gradient.hpp"
#include "aqc/optimizer.hpp"
#include "aqc/variance.hpp"

namespace aqc {

enum class RunMode { CompileState, CompileUnitary, VarianceScan, TrotterBenchmark };

const char* run_mode_name(RunMode mode);

struct AnsatzConfig {
    std::size_t qubits = 4;
    std::size_t layers = 1;
    std::size_t reps = 1;
    // empty -> brick pattern
    std::vector<std::pair<std::size_t, std::size_t>> connectivity;

    AnsatzSpec to_spec() const;
};

struct TargetConfig {
    enum class Kind { RandomAnsatzState, File, Trotter };
    Kind kind = Kind::RandomAnsatzState;
    std::string path;
    std::size_t sites = 2;
    double dt = 0.2;
    std::size_t steps = 1;
    std::optional<double> time;  // defaults to steps * dt

    double evolution_time() const { return time ? *time : dt * static_cast<double>(steps); }
};

struct CostConfig {
    enum class Kind {
        Global,          // state overlap cost
        LocalFull,       // all flip orders, locality weights
        TruncatedLocal,  // k orders, weight rule below
        SurrogateComposite,
        SurrogateMax,
        UnitaryHs,
        UnitaryLocal,
    };
    enum class WeightRule { Default, Unit, Telescoping, UniformLocality, Explicit };

    Kind kind = Kind::Global;
    std::size_t k = 1;
    WeightRule weight_rule = WeightRule::Default;
    std::vector<double> alphas;  // Explicit rule
    WeightSchedule::Mode schedule = WeightSchedule::Mode::Ema;
    double alpha = 1.0;  // surrogate mixing when no schedule applies

    bool unitary_kind() const {
        return kind == Kind::UnitaryHs || kind == Kind::UnitaryLocal;
    }
};

struct OutputConfig {
    std::string dir = "out";
    std::uint64_t checkpoint_every = 0;
    bool twin_global = false;  // run a global-cost twin from the same seed
    bool dump_state = false;
    bool dump_unitary = false;
};

struct ScanConfig {
    std::vector<std::size_t> qubits;
    std::size_t samples = 100000;
    CostConfig::Kind cost = CostConfig::Kind::Global;
    std::size_t k = 1;
    CostConfig::WeightRule weight_rule = CostConfig::WeightRule::Telescoping;
    std::size_t component = 0;
    std::size_t blocks = 100;
};

struct BenchmarkConfig {
    std::size_t sites = 4;
    std::vector<double> dts = {0.4, 0.2, 0.1, 0.05};
    double dt = 0.2;
    std::size_t steps = 2;
};

struct ExperimentConfig {
    RunMode mode = RunMode::CompileState;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 1;
    AnsatzConfig ansatz;
    TargetConfig target;
    CostConfig cost;
    TwoStageConfig optimizer;
    OutputConfig output;
    ScanConfig scan;
    BenchmarkConfig benchmark;
};

/// Strict parse: unknown keys or sections are errors, mode-required fields
/// must be present, and range constraints (k <= n-1, b in 1..3, ...) are
/// checked here so bad runs fail before any work happens.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical text form: fixed key order, round-trip stable. parse(serialize(c))
/// reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string hash_hex(std::uint64_t hash);

}  // namespace aqc
