#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqc/harness.hpp"

using namespace aqc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "aqc_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string tiny_state_config(const std::string& out_dir, unsigned seed = 7) {
    return "mode = \"compile-state\"\n"
           "seed = " + std::to_string(seed) + "\n"
           "[ansatz]\n"
           "qubits = 3\n"
           "[cost]\n"
           "kind = \"truncated-local\"\n"
           "k = 1\n"
           "[optimizer]\n"
           "max_iterations = 40\n"
           "adam_iterations = 5\n"
           "[output]\n"
           "dir = \"" + out_dir + "\"\n";
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config parsing") {
    SUBCASE("minimal compile-state config fills documented defaults") {
        ExperimentConfig cfg = parse_config_text(
            "mode = \"compile-state\"\nseed = 7\n[ansatz]\nqubits = 4\n");
        CHECK(cfg.mode == RunMode::CompileState);
        CHECK(cfg.seed == 7);
        CHECK(cfg.ansatz.layers == 1);
        CHECK(cfg.ansatz.reps == 1);
        CHECK(cfg.cost.kind == CostConfig::Kind::TruncatedLocal);
        CHECK(cfg.cost.k == 1);
        CHECK(cfg.cost.schedule == WeightSchedule::Mode::Ema);
        CHECK(cfg.optimizer.stage_threshold == 0.9);
        CHECK(cfg.target.kind == TargetConfig::Kind::RandomAnsatzState);
    }

    SUBCASE("unknown keys are rejected by name") {
        try {
            parse_config_text("mode = \"compile-state\"\nseed = 1\n[ansatz]\nqubits = 4\n"
                              "qubitz = 5\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("ansatz.qubitz") != std::string::npos);
        }
    }

    SUBCASE("missing seed is an error for stochastic modes") {
        CHECK_THROWS_AS(parse_config_text("mode = \"compile-state\"\n[ansatz]\nqubits = 4\n"),
                        ConfigError);
        // the deterministic benchmark does not need one
        ExperimentConfig cfg =
            parse_config_text("mode = \"trotter-benchmark\"\n[benchmark]\nsites = 4\n");
        CHECK_FALSE(cfg.seed_set);
    }

    SUBCASE("truncation order beyond n - 1 is rejected with the constraint") {
        try {
            parse_config_text("mode = \"compile-state\"\nseed = 1\n[ansatz]\nqubits = 4\n"
                              "[cost]\nkind = \"truncated-local\"\nk = 4\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("k <= n - 1") != std::string::npos);
        }
    }

    SUBCASE("matrix-compilation config in the benchmark shape is accepted") {
        ExperimentConfig cfg = parse_config_text(
            "mode = \"compile-unitary\"\nseed = 3\n"
            "[ansatz]\nqubits = 8\nlayers = 2\n"
            "[target]\nkind = \"trotter\"\nsites = 8\ndt = 0.2\nsteps = 2\n"
            "[cost]\nkind = \"unitary-local\"\nk = 2\n");
        CHECK(cfg.target.steps == 2);
        CHECK(cfg.target.evolution_time() == doctest::Approx(0.4));
        CHECK(cfg.cost.k == 2);
    }

    SUBCASE("mode and cost kind must agree") {
        CHECK_THROWS_AS(
            parse_config_text("mode = \"compile-state\"\nseed = 1\n[ansatz]\nqubits = 4\n"
                              "[cost]\nkind = \"hs\"\n"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_config_text("mode = \"compile-unitary\"\nseed = 1\n[ansatz]\nqubits = 4\n"
                              "[target]\nkind = \"trotter\"\nsites = 4\n"
                              "[cost]\nkind = \"global\"\n"),
            ConfigError);
    }

    SUBCASE("serialize-parse is the identity") {
        ExperimentConfig cfg = parse_config_text(
            "mode = \"compile-unitary\"\nseed = 11\n[ansatz]\nqubits = 4\nlayers = 3\n"
            "[target]\nkind = \"trotter\"\nsites = 4\ndt = 0.1\nsteps = 4\n"
            "[cost]\nkind = \"unitary-local\"\nk = 2\nweights = \"uniform-locality\"\n");
        std::string text = serialize_config(cfg);
        ExperimentConfig back = parse_config_text(text);
        CHECK(serialize_config(back) == text);
        CHECK(config_hash(back) == config_hash(cfg));

        ExperimentConfig scan_cfg = parse_config_text(
            "mode = \"variance-scan\"\nseed = 2\n[scan]\nqubits = [2, 3, 4]\nsamples = 500\n");
        CHECK(serialize_config(parse_config_text(serialize_config(scan_cfg))) ==
              serialize_config(scan_cfg));
    }

    SUBCASE("hash separates configs that differ") {
        ExperimentConfig a = parse_config_text(
            "mode = \"compile-state\"\nseed = 7\n[ansatz]\nqubits = 4\n");
        ExperimentConfig b = parse_config_text(
            "mode = \"compile-state\"\nseed = 8\n[ansatz]\nqubits = 4\n");
        CHECK(config_hash(a) != config_hash(b));
    }
}

TEST_CASE("compile-state experiment produces coherent artifacts") {
    fs::path dir = fresh_dir("smoke");
    ExperimentConfig cfg = parse_config_text(tiny_state_config(dir.string()));
    ExperimentResult result = run_experiment(cfg);

    CHECK(fs::exists(dir / "run.csv"));
    CHECK(fs::exists(dir / "run.jsonl"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "ansatz.json"));
    CHECK(fs::exists(dir / "final_circuit.json"));

    std::string csv = slurp(dir / "run.csv");
    CHECK(csv.find("# aqc ") == 0);
    CHECK(csv.find("config_hash=" + hash_hex(config_hash(cfg))) != std::string::npos);
    CHECK(csv.find("iteration,cost,weight,grad_norm,fidelity") != std::string::npos);

    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("config_hash").get<std::string>() == hash_hex(config_hash(cfg)));
    CHECK(summary.at("version").get<std::string>() == kVersion);
    CHECK(summary.at("rows").get<std::size_t>() == result.record.rows.size());

    for (std::size_t i = 1; i < result.record.rows.size(); ++i)
        CHECK(result.record.rows[i].iteration > result.record.rows[i - 1].iteration);

    ParamCircuit final_circuit =
        circuit_from_json(slurp(dir / "final_circuit.json"));
    CHECK(final_circuit.n_params == 0);
}

TEST_CASE("identical configs reproduce the run byte for byte") {
    fs::path dir_a = fresh_dir("det_a");
    fs::path dir_b = fresh_dir("det_b");
    ExperimentConfig cfg_a = parse_config_text(tiny_state_config(dir_a.string(), 21));
    ExperimentConfig cfg_b = parse_config_text(tiny_state_config(dir_b.string(), 21));
    run_experiment(cfg_a);
    run_experiment(cfg_b);
    // the config hash differs only through output.dir; row content must match
    auto strip_comment = [](std::string text) {
        return text.substr(text.find('\n') + 1);
    };
    CHECK(strip_comment(slurp(dir_a / "run.csv")) == strip_comment(slurp(dir_b / "run.csv")));
}

TEST_CASE("twin runs share the comparison artifact") {
    fs::path dir = fresh_dir("twin");
    std::string text = tiny_state_config(dir.string());
    text += "twin_global = true\n";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.twin_record);
    CHECK(fs::exists(dir / "run_global.csv"));
    CHECK(fs::exists(dir / "comparison.csv"));
    std::string cmp = slurp(dir / "comparison.csv");
    CHECK(cmp.find("iteration,cost_main,cost_global") != std::string::npos);
}

TEST_CASE("checkpoints resume bitwise") {
    fs::path dir_full = fresh_dir("ckpt_full");
    std::string text = tiny_state_config(dir_full.string(), 33);
    text += "checkpoint_every = 5\n";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentResult full = run_experiment(cfg);
    REQUIRE(full.record.rows.size() > 10);

    fs::path ckpt = dir_full / "checkpoint_000000005.bin";
    REQUIRE(fs::exists(ckpt));

    SUBCASE("an iteration-zero checkpoint replays the whole run") {
        fs::path dir_replay = fresh_dir("ckpt_replay");
        ExperimentConfig replay_cfg = cfg;
        replay_cfg.output.dir = dir_replay.string();
        replay_cfg.output.checkpoint_every = 0;
        ExperimentResult replay = resume_experiment(
            replay_cfg, (dir_full / "checkpoint_000000000.bin").string());
        REQUIRE(replay.record.rows.size() == full.record.rows.size());
        for (std::size_t i = 0; i < replay.record.rows.size(); ++i) {
            CHECK(replay.record.rows[i].cost == full.record.rows[i].cost);
            CHECK(replay.record.rows[i].grad_norm == full.record.rows[i].grad_norm);
        }
    }

    SUBCASE("tail rows match the uninterrupted run") {
        fs::path dir_resume = fresh_dir("ckpt_resume");
        ExperimentConfig resumed_cfg = cfg;
        resumed_cfg.output.dir = dir_resume.string();
        // output location is not part of the problem identity
        resumed_cfg.output.checkpoint_every = 0;
        ExperimentResult tail = resume_experiment(resumed_cfg, ckpt.string());

        REQUIRE(tail.record.rows.size() + 5 == full.record.rows.size());
        for (std::size_t i = 0; i < tail.record.rows.size(); ++i) {
            const RunRow& expect = full.record.rows[i + 5];
            const RunRow& got = tail.record.rows[i];
            CHECK(got.iteration == expect.iteration);
            CHECK(got.cost == expect.cost);
            CHECK(got.weight == expect.weight);
            CHECK(got.grad_norm == expect.grad_norm);
            CHECK(*got.fidelity == *expect.fidelity);
        }
        CHECK(tail.record.best_cost == full.record.best_cost);
    }

    SUBCASE("an edited config is refused") {
        ExperimentConfig edited = cfg;
        edited.seed = 34;
        CHECK_THROWS_WITH_AS(resume_experiment(edited, ckpt.string()),
                             doctest::Contains("refusing to resume"), std::runtime_error);
    }
}

TEST_CASE("non-checkpoint files are refused") {
    fs::path dir = fresh_dir("bad_ckpt");
    fs::path bogus = dir / "not_a_checkpoint.bin";
    {
        std::ofstream os(bogus, std::ios::binary);
        os << "garbage bytes";
    }
    CHECK_THROWS_AS(read_checkpoint(bogus.string()), std::runtime_error);
}

TEST_CASE("checkpoint hash ignores output location") {
    // moving artifacts elsewhere must not poison resume
    ExperimentConfig a = parse_config_text(tiny_state_config("dir_one", 5));
    ExperimentConfig b = parse_config_text(tiny_state_config("dir_two", 5));
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("emit_convergence") {
    ArtifactInfo info{kVersion, "deadbeefdeadbeef"};

    SUBCASE("single-row record gives header plus one row") {
        RunRecord record;
        RunRow row;
        row.iteration = 0;
        row.cost = 0.5;
        row.weight = 1.0;
        row.grad_norm = 0.1;
        record.rows.push_back(row);
        record.best_cost = record.final_cost = 0.5;

        fs::path dir = fresh_dir("emit_one");
        emit_convergence(record, dir.string(), "run", info);
        std::string csv = slurp(dir / "run.csv");
        CHECK(csv.find("iteration,cost,weight,grad_norm\n") != std::string::npos);
        std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
        CHECK(lines == 3);  // comment, header, one row
    }

    SUBCASE("fidelity column is omitted entirely when absent") {
        RunRecord record;
        RunRow row;
        row.iteration = 0;
        row.cost = 0.5;
        record.rows.push_back(row);
        std::ostringstream os;
        write_record_csv(os, record, info);
        CHECK(os.str().find("fidelity") == std::string::npos);
        CHECK(os.str().find(",\n") == std::string::npos);
    }

    SUBCASE("empty records are rejected") {
        RunRecord record;
        CHECK_THROWS_AS(emit_convergence(record, "/tmp", "x", info), std::invalid_argument);
    }
}

TEST_CASE("compile-unitary experiment records the trotter baseline") {
    fs::path dir = fresh_dir("unitary_smoke");
    ExperimentConfig cfg = parse_config_text(
        "mode = \"compile-unitary\"\nseed = 13\n"
        "[ansatz]\nqubits = 2\nreps = 3\n"
        "[target]\nkind = \"trotter\"\nsites = 2\ndt = 0.2\nsteps = 2\n"
        "[cost]\nkind = \"unitary-local\"\nk = 1\n"
        "[optimizer]\nmax_iterations = 300\nadam_iterations = 20\n"
        "[output]\ndir = \"" + dir.string() + "\"\ndump_unitary = true\n");
    ExperimentResult result = run_experiment(cfg);

    REQUIRE(result.trotter_baseline_fidelity);
    // a single bond splits exactly, so the baseline is 1 up to rounding
    CHECK(*result.trotter_baseline_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(result.record.final_fidelity);
    CHECK(*result.record.final_fidelity > 0.99);

    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.contains("trotter_baseline_fidelity"));
    CHECK(summary.at("chain_boundary").get<std::string>() == "open");
    CHECK(summary.at("chain_bond_terms").get<std::size_t>() == 1);
    CHECK(summary.at("evolution_time").get<double>() == doctest::Approx(0.4));
    CHECK(fs::exists(dir / "target_unitary.bin"));
    CHECK(fs::exists(dir / "compiled_unitary.bin"));
}

TEST_CASE("variance-scan mode writes its table") {
    fs::path dir = fresh_dir("scan");
    ExperimentConfig cfg = parse_config_text(
        "mode = \"variance-scan\"\nseed = 4\n[scan]\nqubits = [2, 3]\nsamples = 500\n"
        "blocks = 10\n[output]\ndir = \"" + dir.string() + "\"\n");
    ExperimentResult result = run_experiment(cfg);
    CHECK(result.variance.size() == 2);
    std::string csv = slurp(dir / "variance.csv");
    CHECK(csv.find("n,cost_kind,k,samples,variance,stderr,seed") != std::string::npos);
}

TEST_CASE("trotter benchmark reports a second-order slope") {
    fs::path dir = fresh_dir("bench");
    ExperimentConfig cfg = parse_config_text(
        "mode = \"trotter-benchmark\"\n[benchmark]\nsites = 4\n[output]\ndir = \"" +
        dir.string() + "\"\n");
    ExperimentResult result = run_experiment(cfg);
    CHECK(std::abs(result.trotter_error_slope - 2.0) < 0.1);
    CHECK(result.trotter_run_fidelity > 0.9);
    CHECK(fs::exists(dir / "trotter.csv"));
}

TEST_SUITE_END();
