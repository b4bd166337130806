#include "aqc/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace aqc {

namespace {

// ---------------------------------------------------------------------------
// Key-value text format: [section] headers, key = value lines, # comments.
// Values: "string", number, true/false, [n, n, ...], [[a,b], [c,d], ...].
// ---------------------------------------------------------------------------

struct TomlValue {
    enum class Type { String, Number, Bool, NumberArray, PairArray } type;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> nums;
    std::vector<std::pair<double, double>> pairs;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("invalid number for key '" + key + "': " + text);
    return v;
}

TomlValue parse_value(const std::string& raw, const std::string& key) {
    TomlValue value;
    std::string text = trim(raw);
    if (text.empty()) throw ConfigError("missing value for key '" + key + "'");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ConfigError("unterminated string for key '" + key + "'");
        value.type = TomlValue::Type::String;
        value.str = text.substr(1, text.size() - 2);
        return value;
    }
    if (text == "true" || text == "false") {
        value.type = TomlValue::Type::Bool;
        value.boolean = text == "true";
        return value;
    }
    if (text.front() == '[') {
        if (text.back() != ']')
            throw ConfigError("unterminated array for key '" + key + "'");
        std::string inner = trim(text.substr(1, text.size() - 2));
        if (!inner.empty() && inner.front() == '[') {
            value.type = TomlValue::Type::PairArray;
            std::size_t pos = 0;
            while (pos < inner.size()) {
                std::size_t open = inner.find('[', pos);
                if (open == std::string::npos) break;
                std::size_t close = inner.find(']', open);
                if (close == std::string::npos)
                    throw ConfigError("unterminated pair in array for key '" + key + "'");
                std::string pair_text = inner.substr(open + 1, close - open - 1);
                std::size_t comma = pair_text.find(',');
                if (comma == std::string::npos)
                    throw ConfigError("pair needs two entries for key '" + key + "'");
                double a = parse_number(trim(pair_text.substr(0, comma)), key);
                double b = parse_number(trim(pair_text.substr(comma + 1)), key);
                value.pairs.emplace_back(a, b);
                pos = close + 1;
            }
            return value;
        }
        value.type = TomlValue::Type::NumberArray;
        std::size_t pos = 0;
        while (pos <= inner.size()) {
            std::size_t comma = inner.find(',', pos);
            std::string piece = trim(comma == std::string::npos ? inner.substr(pos)
                                                                : inner.substr(pos, comma - pos));
            if (!piece.empty()) value.nums.push_back(parse_number(piece, key));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return value;
    }
    value.type = TomlValue::Type::Number;
    value.num = parse_number(text, key);
    return value;
}

class KeyTable {
public:
    explicit KeyTable(const std::string& text) {
        std::istringstream in(text);
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) {
                // keep # inside quotes
                bool quoted = false;
                for (std::size_t i = 0; i < hash; ++i)
                    if (line[i] == '"') quoted = !quoted;
                if (!quoted) line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ConfigError("empty section name at line " + std::to_string(line_no));
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected key = value at line " + std::to_string(line_no));
            std::string key = trim(line.substr(0, eq));
            if (key.empty())
                throw ConfigError("empty key at line " + std::to_string(line_no));
            std::string full = section.empty() ? key : section + "." + key;
            if (entries_.count(full))
                throw ConfigError("duplicate key '" + full + "'");
            entries_.emplace(full, parse_value(line.substr(eq + 1), full));
        }
    }

    const TomlValue* take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        consumed_.insert(key);
        return &it->second;
    }

    void finish() const {
        for (const auto& [key, value] : entries_) {
            if (!consumed_.count(key))
                throw ConfigError("unknown key '" + key + "'");
        }
    }

    std::string take_string(const std::string& key, const std::string& fallback) {
        const TomlValue* v = take(key);
        if (!v) return fallback;
        if (v->type != TomlValue::Type::String)
            throw ConfigError("key '" + key + "' must be a string");
        return v->str;
    }

    std::optional<std::string> take_string_opt(const std::string& key) {
        const TomlValue* v = take(key);
        if (!v) return std::nullopt;
        if (v->type != TomlValue::Type::String)
            throw ConfigError("key '" + key + "' must be a string");
        return v->str;
    }

    std::optional<double> take_number_opt(const std::string& key) {
        const TomlValue* v = take(key);
        if (!v) return std::nullopt;
        if (v->type != TomlValue::Type::Number)
            throw ConfigError("key '" + key + "' must be a number");
        return v->num;
    }

    double take_number(const std::string& key, double fallback) {
        auto v = take_number_opt(key);
        return v ? *v : fallback;
    }

    std::uint64_t take_uint(const std::string& key, std::uint64_t fallback) {
        auto v = take_number_opt(key);
        if (!v) return fallback;
        if (*v < 0 || *v != std::floor(*v))
            throw ConfigError("key '" + key + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(*v);
    }

    std::optional<std::uint64_t> take_uint_opt(const std::string& key) {
        auto v = take_number_opt(key);
        if (!v) return std::nullopt;
        if (*v < 0 || *v != std::floor(*v))
            throw ConfigError("key '" + key + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(*v);
    }

    bool take_bool(const std::string& key, bool fallback) {
        const TomlValue* v = take(key);
        if (!v) return fallback;
        if (v->type != TomlValue::Type::Bool)
            throw ConfigError("key '" + key + "' must be true or false");
        return v->boolean;
    }

private:
    std::map<std::string, TomlValue> entries_;
    std::set<std::string> consumed_;
};

RunMode mode_from_name(const std::string& name) {
    if (name == "compile-state") return RunMode::CompileState;
    if (name == "compile-unitary") return RunMode::CompileUnitary;
    if (name == "variance-scan") return RunMode::VarianceScan;
    if (name == "trotter-benchmark") return RunMode::TrotterBenchmark;
    throw ConfigError("unknown mode '" + name + "'");
}

CostConfig::Kind cost_kind_from_name(const std::string& name) {
    if (name == "global") return CostConfig::Kind::Global;
    if (name == "local-full") return CostConfig::Kind::LocalFull;
    if (name == "truncated-local") return CostConfig::Kind::TruncatedLocal;
    if (name == "surrogate-composite") return CostConfig::Kind::SurrogateComposite;
    if (name == "surrogate-max") return CostConfig::Kind::SurrogateMax;
    if (name == "hs") return CostConfig::Kind::UnitaryHs;
    if (name == "unitary-local") return CostConfig::Kind::UnitaryLocal;
    throw ConfigError("unknown cost kind '" + name + "'");
}

const char* cost_kind_to_name(CostConfig::Kind kind) {
    switch (kind) {
    case CostConfig::Kind::Global: return "global";
    case CostConfig::Kind::LocalFull: return "local-full";
    case CostConfig::Kind::TruncatedLocal: return "truncated-local";
    case CostConfig::Kind::SurrogateComposite: return "surrogate-composite";
    case CostConfig::Kind::SurrogateMax: return "surrogate-max";
    case CostConfig::Kind::UnitaryHs: return "hs";
    default: return "unitary-local";
    }
}

CostConfig::WeightRule weight_rule_from_name(const std::string& name) {
    if (name == "default") return CostConfig::WeightRule::Default;
    if (name == "unit") return CostConfig::WeightRule::Unit;
    if (name == "telescoping") return CostConfig::WeightRule::Telescoping;
    if (name == "uniform-locality") return CostConfig::WeightRule::UniformLocality;
    if (name == "explicit") return CostConfig::WeightRule::Explicit;
    throw ConfigError("unknown weight rule '" + name + "'");
}

const char* weight_rule_to_name(CostConfig::WeightRule rule) {
    switch (rule) {
    case CostConfig::WeightRule::Default: return "default";
    case CostConfig::WeightRule::Unit: return "unit";
    case CostConfig::WeightRule::Telescoping: return "telescoping";
    case CostConfig::WeightRule::UniformLocality: return "uniform-locality";
    default: return "explicit";
    }
}

WeightSchedule::Mode schedule_from_name(const std::string& name) {
    if (name == "none") return WeightSchedule::Mode::None;
    if (name == "sqrt") return WeightSchedule::Mode::SqrtCost;
    if (name == "ema") return WeightSchedule::Mode::Ema;
    throw ConfigError("unknown schedule mode '" + name + "'");
}

TargetConfig::Kind target_kind_from_name(const std::string& name) {
    if (name == "random-ansatz-state") return TargetConfig::Kind::RandomAnsatzState;
    if (name == "file") return TargetConfig::Kind::File;
    if (name == "trotter") return TargetConfig::Kind::Trotter;
    throw ConfigError("unknown target kind '" + name + "'");
}

const char* target_kind_to_name(TargetConfig::Kind kind) {
    switch (kind) {
    case TargetConfig::Kind::RandomAnsatzState: return "random-ansatz-state";
    case TargetConfig::Kind::File: return "file";
    default: return "trotter";
    }
}

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

const char* run_mode_name(RunMode mode) {
    switch (mode) {
    case RunMode::CompileState: return "compile-state";
    case RunMode::CompileUnitary: return "compile-unitary";
    case RunMode::VarianceScan: return "variance-scan";
    default: return "trotter-benchmark";
    }
}

AnsatzSpec AnsatzConfig::to_spec() const {
    AnsatzSpec spec;
    spec.n_qubits = qubits;
    spec.layers = layers;
    spec.block_reps = reps;
    spec.connectivity = connectivity.empty() ? brick_connectivity(qubits) : connectivity;
    return spec;
}

ExperimentConfig parse_config_text(const std::string& text) {
    KeyTable table(text);
    ExperimentConfig cfg;

    auto mode_name = table.take_string_opt("mode");
    if (!mode_name) throw ConfigError("missing required key 'mode'");
    cfg.mode = mode_from_name(*mode_name);

    auto seed = table.take_uint_opt("seed");
    if (seed) {
        cfg.seed = *seed;
        cfg.seed_set = true;
    } else if (cfg.mode != RunMode::TrotterBenchmark) {
        throw ConfigError("missing required key 'seed' (runs must pin their seed explicitly)");
    }
    cfg.threads = static_cast<unsigned>(table.take_uint("threads", 1));
    if (cfg.threads == 0) throw ConfigError("threads must be at least 1");

    // [ansatz]
    if (cfg.mode == RunMode::CompileState || cfg.mode == RunMode::CompileUnitary) {
        auto qubits = table.take_uint_opt("ansatz.qubits");
        if (!qubits) throw ConfigError("missing required key 'ansatz.qubits'");
        cfg.ansatz.qubits = *qubits;
        cfg.ansatz.layers = table.take_uint("ansatz.layers", 1);
        cfg.ansatz.reps = table.take_uint("ansatz.reps", 1);
        if (const TomlValue* v = table.take("ansatz.connectivity")) {
            if (v->type != TomlValue::Type::PairArray)
                throw ConfigError("ansatz.connectivity must be an array of pairs");
            for (const auto& [a, b] : v->pairs)
                cfg.ansatz.connectivity.emplace_back(static_cast<std::size_t>(a),
                                                     static_cast<std::size_t>(b));
        }
        if (cfg.ansatz.qubits < 2) throw ConfigError("ansatz.qubits must be at least 2");
        if (cfg.ansatz.layers < 1) throw ConfigError("ansatz.layers must be at least 1");
        if (cfg.ansatz.reps < 1 || cfg.ansatz.reps > 3)
            throw ConfigError("ansatz.reps must lie in 1..3");
    }

    // [target]
    if (cfg.mode == RunMode::CompileState || cfg.mode == RunMode::CompileUnitary) {
        std::string default_kind = cfg.mode == RunMode::CompileState
                                       ? "random-ansatz-state"
                                       : "trotter";
        cfg.target.kind = target_kind_from_name(table.take_string("target.kind", default_kind));
        cfg.target.path = table.take_string("target.path", "");
        cfg.target.sites = table.take_uint("target.sites", cfg.ansatz.qubits);
        cfg.target.dt = table.take_number("target.dt", 0.2);
        cfg.target.steps = table.take_uint("target.steps", 1);
        if (auto t = table.take_number_opt("target.time")) cfg.target.time = *t;

        if (cfg.mode == RunMode::CompileState &&
            cfg.target.kind == TargetConfig::Kind::Trotter)
            throw ConfigError("compile-state expects a state target, not 'trotter'");
        if (cfg.mode == RunMode::CompileUnitary &&
            cfg.target.kind == TargetConfig::Kind::RandomAnsatzState)
            throw ConfigError("compile-unitary expects a matrix target");
        if (cfg.target.kind == TargetConfig::Kind::File && cfg.target.path.empty())
            throw ConfigError("missing required key 'target.path' for a file target");
        if (cfg.target.kind == TargetConfig::Kind::Trotter) {
            if (cfg.target.sites != cfg.ansatz.qubits)
                throw ConfigError("target.sites must equal ansatz.qubits");
            if (!(cfg.target.dt > 0)) throw ConfigError("target.dt must be positive");
            if (cfg.target.steps < 1) throw ConfigError("target.steps must be at least 1");
        }
    }

    // [cost]
    if (cfg.mode == RunMode::CompileState || cfg.mode == RunMode::CompileUnitary) {
        std::string default_kind =
            cfg.mode == RunMode::CompileState ? "truncated-local" : "unitary-local";
        cfg.cost.kind = cost_kind_from_name(table.take_string("cost.kind", default_kind));
        cfg.cost.k = table.take_uint("cost.k", cfg.mode == RunMode::CompileUnitary ? 2 : 1);
        cfg.cost.weight_rule =
            weight_rule_from_name(table.take_string("cost.weights", "default"));
        if (const TomlValue* v = table.take("cost.alphas")) {
            if (v->type != TomlValue::Type::NumberArray)
                throw ConfigError("cost.alphas must be an array of numbers");
            cfg.cost.alphas = v->nums;
        }
        cfg.cost.schedule = schedule_from_name(table.take_string("cost.schedule", "ema"));
        cfg.cost.alpha = table.take_number("cost.alpha", 1.0);

        bool unitary_cost = cfg.cost.unitary_kind();
        if (unitary_cost != (cfg.mode == RunMode::CompileUnitary))
            throw ConfigError(std::string("cost kind '") + cost_kind_to_name(cfg.cost.kind) +
                              "' does not fit mode '" + run_mode_name(cfg.mode) + "'");
        bool truncated = cfg.cost.kind == CostConfig::Kind::TruncatedLocal ||
                         cfg.cost.kind == CostConfig::Kind::UnitaryLocal;
        if (truncated) {
            if (cfg.cost.k < 1 || cfg.cost.k > cfg.ansatz.qubits - 1)
                throw ConfigError("cost.k must satisfy 1 <= k <= n - 1 (the truncation "
                                  "order cannot exceed the qubit count minus one)");
        }
        if (cfg.cost.weight_rule == CostConfig::WeightRule::Explicit &&
            cfg.cost.alphas.size() != cfg.cost.k)
            throw ConfigError("cost.alphas must list exactly k coefficients");
        if (!(cfg.cost.alpha >= 0.0 && cfg.cost.alpha <= 1.0))
            throw ConfigError("cost.alpha must lie in [0, 1]");
    }

    // [optimizer]
    if (cfg.mode == RunMode::CompileState || cfg.mode == RunMode::CompileUnitary) {
        TwoStageConfig& opt = cfg.optimizer;
        opt.stage_threshold = table.take_number("optimizer.stage_threshold", 0.9);
        opt.max_iterations = table.take_uint("optimizer.max_iterations", 3000);
        opt.adam_iterations = table.take_uint("optimizer.adam_iterations", 1000);
        opt.restarts = table.take_uint("optimizer.restarts", 1);
        opt.success_cost = table.take_number("optimizer.success_cost", 1e-10);
        opt.grad_tolerance = table.take_number("optimizer.grad_tolerance", 1e-12);
        opt.stall_window = table.take_uint("optimizer.stall_window", 50);
        opt.stall_eps = table.take_number("optimizer.stall_eps", 1e-10);
        opt.adam.lr = table.take_number("optimizer.adam_lr", 0.01);
        opt.adam.beta1 = table.take_number("optimizer.adam_beta1", 0.9);
        opt.adam.beta2 = table.take_number("optimizer.adam_beta2", 0.999);
        opt.adam.eps = table.take_number("optimizer.adam_eps", 1e-8);
        opt.lbfgs_memory = table.take_uint("optimizer.lbfgs_memory", 10);
        opt.wolfe_c1 = table.take_number("optimizer.wolfe_c1", 1e-4);
        opt.wolfe_c2 = table.take_number("optimizer.wolfe_c2", 0.9);
        if (!(opt.stage_threshold > 0.0 && opt.stage_threshold <= 1.0))
            throw ConfigError("optimizer.stage_threshold must lie in (0, 1]");
        if (opt.max_iterations < 1 || opt.adam_iterations < 1 || opt.restarts < 1)
            throw ConfigError("optimizer budgets must be positive");
    }

    // [output]
    cfg.output.dir = table.take_string("output.dir", "out");
    cfg.output.checkpoint_every = table.take_uint("output.checkpoint_every", 0);
    cfg.output.twin_global = table.take_bool("output.twin_global", false);
    cfg.output.dump_state = table.take_bool("output.dump_state", false);
    cfg.output.dump_unitary = table.take_bool("output.dump_unitary", false);
    if (cfg.output.twin_global && cfg.mode != RunMode::CompileState &&
        cfg.mode != RunMode::CompileUnitary)
        throw ConfigError("output.twin_global applies to compile modes only");

    // [scan]
    if (cfg.mode == RunMode::VarianceScan) {
        const TomlValue* qubits = table.take("scan.qubits");
        if (!qubits) throw ConfigError("missing required key 'scan.qubits'");
        if (qubits->type != TomlValue::Type::NumberArray)
            throw ConfigError("scan.qubits must be an array of integers");
        for (double q : qubits->nums) {
            if (q < 1 || q != std::floor(q))
                throw ConfigError("scan.qubits entries must be positive integers");
            cfg.scan.qubits.push_back(static_cast<std::size_t>(q));
        }
        cfg.scan.samples = table.take_uint("scan.samples", 100000);
        cfg.scan.cost = cost_kind_from_name(table.take_string("scan.cost", "global"));
        cfg.scan.k = table.take_uint("scan.k", 1);
        cfg.scan.weight_rule =
            weight_rule_from_name(table.take_string("scan.weights", "telescoping"));
        cfg.scan.component = table.take_uint("scan.component", 0);
        cfg.scan.blocks = table.take_uint("scan.blocks", 100);
        if (cfg.scan.cost != CostConfig::Kind::Global &&
            cfg.scan.cost != CostConfig::Kind::LocalFull &&
            cfg.scan.cost != CostConfig::Kind::TruncatedLocal)
            throw ConfigError("scan.cost must be a state cost");
        for (std::size_t n : cfg.scan.qubits) {
            bool flips = cfg.scan.cost != CostConfig::Kind::Global;
            std::size_t k = cfg.scan.cost == CostConfig::Kind::LocalFull ? n - 1 : cfg.scan.k;
            if (flips && (k < 1 || k > n - 1))
                throw ConfigError("scan.k must satisfy 1 <= k <= n - 1 (the truncation "
                                  "order cannot exceed the qubit count minus one)");
        }
    }

    // [benchmark]
    if (cfg.mode == RunMode::TrotterBenchmark) {
        auto sites = table.take_uint_opt("benchmark.sites");
        if (!sites) throw ConfigError("missing required key 'benchmark.sites'");
        cfg.benchmark.sites = *sites;
        if (const TomlValue* v = table.take("benchmark.dts")) {
            if (v->type != TomlValue::Type::NumberArray)
                throw ConfigError("benchmark.dts must be an array of numbers");
            cfg.benchmark.dts = v->nums;
        }
        cfg.benchmark.dt = table.take_number("benchmark.dt", 0.2);
        cfg.benchmark.steps = table.take_uint("benchmark.steps", 2);
        if (cfg.benchmark.sites < 2) throw ConfigError("benchmark.sites must be at least 2");
        for (double dt : cfg.benchmark.dts)
            if (!(dt > 0)) throw ConfigError("benchmark.dts entries must be positive");
    }

    table.finish();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "mode = \"";
    out += run_mode_name(cfg.mode);
    out += "\"\n";
    if (cfg.seed_set) {
        out += "seed = ";
        append_number(out, static_cast<double>(cfg.seed));
        out += "\n";
    }
    out += "threads = " + std::to_string(cfg.threads) + "\n";

    if (cfg.mode == RunMode::CompileState || cfg.mode == RunMode::CompileUnitary) {
        out += "\n[ansatz]\n";
        out += "qubits = " + std::to_string(cfg.ansatz.qubits) + "\n";
        out += "layers = " + std::to_string(cfg.ansatz.layers) + "\n";
        out += "reps = " + std::to_string(cfg.ansatz.reps) + "\n";
        if (!cfg.ansatz.connectivity.empty()) {
            out += "connectivity = [";
            for (std::size_t i = 0; i < cfg.ansatz.connectivity.size(); ++i) {
                if (i) out += ", ";
                out += "[" + std::to_string(cfg.ansatz.connectivity[i].first) + ", " +
                       std::to_string(cfg.ansatz.connectivity[i].second) + "]";
            }
            out += "]\n";
        }

        out += "\n[target]\n";
        out += "kind = \"";
        out += target_kind_to_name(cfg.target.kind);
        out += "\"\n";
        if (!cfg.target.path.empty()) out += "path = \"" + cfg.target.path + "\"\n";
        if (cfg.target.kind == TargetConfig::Kind::Trotter) {
            out += "sites = " + std::to_string(cfg.target.sites) + "\n";
            out += "dt = ";
            append_number(out, cfg.target.dt);
            out += "\nsteps = " + std::to_string(cfg.target.steps) + "\n";
            if (cfg.target.time) {
                out += "time = ";
                append_number(out, *cfg.target.time);
                out += "\n";
            }
        }

        out += "\n[cost]\n";
        out += "kind = \"";
        out += cost_kind_to_name(cfg.cost.kind);
        out += "\"\n";
        out += "k = " + std::to_string(cfg.cost.k) + "\n";
        out += "weights = \"";
        out += weight_rule_to_name(cfg.cost.weight_rule);
        out += "\"\n";
        if (!cfg.cost.alphas.empty()) {
            out += "alphas = [";
            for (std::size_t i = 0; i < cfg.cost.alphas.size(); ++i) {
                if (i) out += ", ";
                append_number(out, cfg.cost.alphas[i]);
            }
            out += "]\n";
        }
        out += "schedule = \"";
        out += schedule_mode_name(cfg.cost.schedule);
        out += "\"\n";
        out += "alpha = ";
        append_number(out, cfg.cost.alpha);
        out += "\n";

        const TwoStageConfig& opt = cfg.optimizer;
        out += "\n[optimizer]\n";
        out += "stage_threshold = ";
        append_number(out, opt.stage_threshold);
        out += "\nmax_iterations = " + std::to_string(opt.max_iterations);
        out += "\nadam_iterations = " + std::to_string(opt.adam_iterations);
        out += "\nrestarts = " + std::to_string(opt.restarts);
        out += "\nsuccess_cost = ";
        append_number(out, opt.success_cost);
        out += "\ngrad_tolerance = ";
        append_number(out, opt.grad_tolerance);
        out += "\nstall_window = " + std::to_string(opt.stall_window);
        out += "\nstall_eps = ";
        append_number(out, opt.stall_eps);
        out += "\nadam_lr = ";
        append_number(out, opt.adam.lr);
        out += "\nadam_beta1 = ";
        append_number(out, opt.adam.beta1);
        out += "\nadam_beta2 = ";
        append_number(out, opt.adam.beta2);
        out += "\nadam_eps = ";
        append_number(out, opt.adam.eps);
        out += "\nlbfgs_memory = " + std::to_string(opt.lbfgs_memory);
        out += "\nwolfe_c1 = ";
        append_number(out, opt.wolfe_c1);
        out += "\nwolfe_c2 = ";
        append_number(out, opt.wolfe_c2);
        out += "\n";
    }

    if (cfg.mode == RunMode::VarianceScan) {
        out += "\n[scan]\n";
        out += "qubits = [";
        for (std::size_t i = 0; i < cfg.scan.qubits.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(cfg.scan.qubits[i]);
        }
        out += "]\n";
        out += "samples = " + std::to_string(cfg.scan.samples) + "\n";
        out += "cost = \"";
        out += cost_kind_to_name(cfg.scan.cost);
        out += "\"\n";
        out += "k = " + std::to_string(cfg.scan.k) + "\n";
        out += "weights = \"";
        out += weight_rule_to_name(cfg.scan.weight_rule);
        out += "\"\n";
        out += "component = " + std::to_string(cfg.scan.component) + "\n";
        out += "blocks = " + std::to_string(cfg.scan.blocks) + "\n";
    }

    if (cfg.mode == RunMode::TrotterBenchmark) {
        out += "\n[benchmark]\n";
        out += "sites = " + std::to_string(cfg.benchmark.sites) + "\n";
        out += "dts = [";
        for (std::size_t i = 0; i < cfg.benchmark.dts.size(); ++i) {
            if (i) out += ", ";
            append_number(out, cfg.benchmark.dts[i]);
        }
        out += "]\n";
        out += "dt = ";
        append_number(out, cfg.benchmark.dt);
        out += "\nsteps = " + std::to_string(cfg.benchmark.steps) + "\n";
    }

    out += "\n[output]\n";
    out += "dir = \"" + cfg.output.dir + "\"\n";
    out += "checkpoint_every = " + std::to_string(cfg.output.checkpoint_every) + "\n";
    out += std::string("twin_global = ") + (cfg.output.twin_global ? "true" : "false") + "\n";
    out += std::string("dump_state = ") + (cfg.output.dump_state ? "true" : "false") + "\n";
    out += std::string("dump_unitary = ") + (cfg.output.dump_unitary ? "true" : "false") + "\n";
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    // Where artifacts land and how wide the engine runs do not change the
    // problem, so they stay out of the identity hash; checkpoints remain
    // resumable after the output directory moves.
    ExperimentConfig normalized = config;
    normalized.output = OutputConfig{};
    normalized.threads = 1;
    std::string text = serialize_config(normalized);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace aqc
