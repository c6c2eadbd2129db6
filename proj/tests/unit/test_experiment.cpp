#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qevo/csv.hpp"
#include "qevo/experiment.hpp"
#include "qevo/svg_plot.hpp"

using namespace qevo;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qevo_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_gate_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.kind = Concept::Gate;
    cfg.strategy = "mu";
    cfg.generations = 4;
    cfg.population = 8;
    cfg.steps = 50;
    cfg.gates = 12;
    cfg.seeds = {0, 1};
    cfg.out_dir = out_dir;
    cfg.jobs = 1;
    cfg.apply_defaults();
    return cfg;
}

}  // namespace

TEST_CASE("defaults fill in the standard per-concept settings") {
    SUBCASE("gate concept") {
        ExperimentConfig cfg;
        cfg.kind = Concept::Gate;
        cfg.apply_defaults();
        CHECK(cfg.generations == 200);
        CHECK(cfg.population == 250);
        CHECK(cfg.steps == 50);
        CHECK(cfg.num_qubits == 6);
        CHECK(cfg.gates == 70);
        CHECK(cfg.sigma_params == 0.01);
        CHECK(cfg.sigma_arch == 1.0);
        CHECK(cfg.mutation_rate == 0.1);
        CHECK(cfg.tau == 100);  // 40% of the population for tournaments
        CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
        CHECK(cfg.resolved_strategy() == Strategy::ArchMu);
    }
    SUBCASE("layer and prototype concepts") {
        ExperimentConfig layer;
        layer.kind = Concept::Layer;
        layer.apply_defaults();
        CHECK(layer.layers == 1);
        CHECK(layer.sigma_params == 0.05);
        CHECK(layer.sigma_arch == 10.0);

        ExperimentConfig proto;
        proto.kind = Concept::Prototype;
        proto.apply_defaults();
        CHECK(proto.layers == 8);
        CHECK(proto.gates == 18);
        CHECK(proto.sigma_params == 0.05);
        CHECK(proto.sigma_arch == 10.0);
    }
    SUBCASE("fixed concept uses truncation selection") {
        ExperimentConfig cfg;
        cfg.kind = Concept::Fixed;
        cfg.apply_defaults();
        CHECK(cfg.layers == 4);
        CHECK(cfg.sigma_params == 0.01);
        CHECK(cfg.tau == 5);
        CHECK(cfg.resolved_strategy() == Strategy::Mu);
    }
    SUBCASE("nn concept") {
        ExperimentConfig cfg;
        cfg.kind = Concept::NN;
        cfg.apply_defaults();
        CHECK(cfg.hidden1 == 64);
        CHECK(cfg.hidden2 == 64);
        CHECK(cfg.sigma_params == 0.01);
        CHECK(cfg.tau == 5);
    }
    SUBCASE("strategy validation is concept-aware") {
        ExperimentConfig cfg;
        cfg.kind = Concept::Gate;
        cfg.strategy = "laremu";
        cfg.apply_defaults();
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("config json round trip") {
    ExperimentConfig cfg = small_gate_config("some_dir");
    cfg.fixed_eval_seed = true;
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.kind == cfg.kind);
    CHECK(back.strategy == cfg.strategy);
    CHECK(back.generations == cfg.generations);
    CHECK(back.population == cfg.population);
    CHECK(back.tau == cfg.tau);
    CHECK(back.sigma_params == cfg.sigma_params);
    CHECK(back.seeds == cfg.seeds);
    CHECK(back.fixed_eval_seed == cfg.fixed_eval_seed);
}

TEST_CASE("a degenerate random-baseline run emits one row per seed") {
    ExperimentConfig cfg;
    cfg.kind = Concept::Random;
    cfg.generations = 1;
    cfg.population = 2;
    cfg.steps = 50;
    cfg.tau = 1;
    cfg.seeds = {0, 1, 2};
    cfg.out_dir = fresh_dir("random_run");
    cfg.jobs = 1;
    cfg.apply_defaults();

    const ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.records.size() == 3);
    for (const GenerationRecord& rec : result.records) {
        CHECK(rec.generation == 0);
        CHECK(std::abs(rec.best_score) < 20.0);
        CHECK(rec.best_param_count == 0);
    }
    CHECK(fs::exists(result.metrics_path));
    CHECK(fs::exists(result.timing_path));
}

TEST_CASE("metrics CSVs are byte-identical across reruns and parallelism") {
    const ExperimentConfig cfg1 = small_gate_config(fresh_dir("det_a"));
    ExperimentConfig cfg2 = cfg1;
    cfg2.out_dir = fresh_dir("det_b");
    ExperimentConfig cfg8 = cfg1;
    cfg8.out_dir = fresh_dir("det_c");
    cfg8.jobs = 8;

    const auto r1 = run_experiment(cfg1);
    const auto r2 = run_experiment(cfg2);
    const auto r8 = run_experiment(cfg8);
    const std::string a = slurp(r1.metrics_path);
    CHECK(a == slurp(r2.metrics_path));
    CHECK(a == slurp(r8.metrics_path));
    CHECK(a.find("generation,seed,best_score") == 0);
}

TEST_CASE("records satisfy the elite conservation identity") {
    const ExperimentConfig cfg = small_gate_config(fresh_dir("conserve"));
    const auto result = run_experiment(cfg);
    REQUIRE(result.records.size() == 8);  // 2 seeds x 4 generations
    for (const GenerationRecord& rec : result.records) {
        CHECK(rec.best_score == 2 * rec.best_own_coins - rec.best_total_coins);
        CHECK(rec.best_gates_param + 4 == rec.best_param_count);
    }
}

TEST_CASE("aggregation averages across seeds") {
    SUBCASE("library-level spot check on two seeds") {
        const std::string dir = fresh_dir("agg_spot");
        std::vector<GenerationRecord> records(4);
        // seed 0
        records[0].generation = 0;
        records[0].seed = 0;
        records[0].best_score = 4;
        records[1].generation = 1;
        records[1].seed = 0;
        records[1].best_score = 6;
        // seed 1
        records[2].generation = 0;
        records[2].seed = 1;
        records[2].best_score = 8;
        records[3].generation = 1;
        records[3].seed = 1;
        records[3].best_score = 10;
        const std::string metrics = dir + "/metrics.csv";
        const std::string agg = dir + "/aggregate.csv";
        write_metrics_csv(metrics, records);
        aggregate_csv(metrics, agg);

        const CsvTable table = read_csv(agg);
        REQUIRE(table.rows.size() == 2);
        const std::size_t mean_col = table.column("best_score_mean");
        const std::size_t std_col = table.column("best_score_std");
        CHECK(parse_double(table.rows[0][mean_col]) == doctest::Approx(6.0));
        CHECK(parse_double(table.rows[0][std_col]) == doctest::Approx(2.0));
        CHECK(parse_double(table.rows[1][mean_col]) == doctest::Approx(8.0));
        CHECK(parse_double(table.rows[1][std_col]) == doctest::Approx(2.0));
        CHECK(parse_double(table.rows[0][table.column("seeds")]) == doctest::Approx(2.0));
    }
    SUBCASE("single seed aggregates to mean=value, std=0") {
        const std::string dir = fresh_dir("agg_single");
        std::vector<GenerationRecord> records(2);
        records[0].generation = 0;
        records[0].seed = 3;
        records[0].avg_score = 1.25;
        records[1].generation = 1;
        records[1].seed = 3;
        records[1].avg_score = -0.5;
        const std::string metrics = dir + "/metrics.csv";
        const std::string agg = dir + "/aggregate.csv";
        write_metrics_csv(metrics, records);
        aggregate_csv(metrics, agg);
        const CsvTable table = read_csv(agg);
        REQUIRE(table.rows.size() == 2);
        CHECK(parse_double(table.rows[0][table.column("avg_score_mean")]) == doctest::Approx(1.25));
        CHECK(parse_double(table.rows[0][table.column("avg_score_std")]) == doctest::Approx(0.0));
        CHECK(parse_double(table.rows[1][table.column("avg_score_mean")]) == doctest::Approx(-0.5));
    }
    SUBCASE("ragged seed coverage is rejected") {
        const std::string dir = fresh_dir("agg_ragged");
        std::vector<GenerationRecord> records(3);
        records[0].generation = 0;
        records[0].seed = 0;
        records[1].generation = 1;
        records[1].seed = 0;
        records[2].generation = 0;
        records[2].seed = 1;
        const std::string metrics = dir + "/metrics.csv";
        write_metrics_csv(metrics, records);
        CHECK_THROWS(aggregate_csv(metrics, dir + "/aggregate.csv"));
    }
}

TEST_CASE("resume reproduces an uninterrupted run byte for byte") {
    ExperimentConfig full = small_gate_config(fresh_dir("resume_full"));
    full.generations = 6;
    full.seeds = {0};
    const auto full_result = run_experiment(full);

    ExperimentConfig half = full;
    half.out_dir = fresh_dir("resume_half");
    half.generations = 3;
    run_experiment(half);

    ExperimentConfig continued = half;
    continued.generations = 6;
    const auto resumed = run_experiment(continued, /*resume=*/true);
    CHECK(slurp(full_result.metrics_path) == slurp(resumed.metrics_path));
}

TEST_CASE("checkpoints round trip through JSON") {
    const ExperimentConfig cfg = small_gate_config(fresh_dir("ckpt"));
    run_experiment(cfg);
    const std::string path = cfg.checkpoint_path(0);
    REQUIRE(fs::exists(path));
    const Checkpoint ckpt = load_checkpoint(path);
    CHECK(ckpt.seed == 0);
    CHECK(ckpt.generation == cfg.generations - 1);
    CHECK(static_cast<int>(ckpt.population.size()) == cfg.population);
    CHECK(ckpt.records.size() == static_cast<std::size_t>(cfg.generations));
    for (const Individual& ind : ckpt.population) CHECK_NOTHROW(lower(ind.genome));

    CHECK_THROWS(load_checkpoint(cfg.out_dir + "/missing.json"));
    const std::string corrupt = cfg.out_dir + "/corrupt.json";
    std::ofstream(corrupt) << "{ not json";
    CHECK_THROWS(load_checkpoint(corrupt));
}

TEST_CASE("replay traces are deterministic and re-sum to the reported totals") {
    const ExperimentConfig cfg = small_gate_config(fresh_dir("replay"));
    run_experiment(cfg);
    const std::string ckpt = cfg.checkpoint_path(1);

    std::ostringstream t1, t2;
    const EpisodeStats s1 = replay_best(ckpt, 9, 0, t1);
    replay_best(ckpt, 9, 0, t2);
    CHECK(t1.str() == t2.str());

    // one line per step plus header/total comment lines
    int step_lines = 0;
    int reward_sum = 0;
    std::istringstream lines(t1.str());
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("step=", 0) != 0) continue;
        ++step_lines;
        const auto r0_pos = line.find("reward0=");
        const auto r1_pos = line.find("reward1=");
        REQUIRE(r0_pos != std::string::npos);
        REQUIRE(r1_pos != std::string::npos);
        reward_sum += std::stoi(line.substr(r0_pos + 8));
        reward_sum += std::stoi(line.substr(r1_pos + 8));
    }
    CHECK(step_lines == cfg.steps);
    CHECK(reward_sum == s1.rewards[0] + s1.rewards[1]);
    const auto totals_pos = t1.str().find("# totals score=" + format_int(reward_sum));
    CHECK(totals_pos != std::string::npos);

    std::ostringstream other_seed;
    replay_best(ckpt, 10, 0, other_seed);  // different seed is a different episode
    CHECK(other_seed.str() != t1.str());
}

TEST_CASE("plot rendering writes one chart per metric") {
    const std::string dir = fresh_dir("plots");
    const ExperimentConfig cfg = small_gate_config(dir);
    const auto result = run_experiment(cfg);
    const std::string agg = dir + "/aggregate.csv";
    aggregate_csv(result.metrics_path, agg);

    const auto files = render_plots({{"gate", agg}}, dir + "/charts");
    REQUIRE(files.size() == 5);
    for (const std::string& f : files) {
        CHECK(fs::exists(f));
        const std::string body = slurp(f);
        CHECK(body.find("<svg") != std::string::npos);
        CHECK(body.find("polyline") != std::string::npos);
    }

    // an aggregate with no data rows renders nothing
    const std::string empty_csv = dir + "/empty.csv";
    {
        std::ofstream out(empty_csv);
        out << "generation,seeds,best_score_mean,best_score_std\n";
    }
    const auto none = render_plots({{"empty", empty_csv}}, dir + "/charts_empty");
    CHECK(none.empty());
}
