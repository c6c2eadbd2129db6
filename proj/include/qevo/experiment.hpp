#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qevo/evolution.hpp"

namespace qevo {

// Full experiment settings. Fields left at their sentinel (-1, or empty for
// seeds) are filled by apply_defaults with the standard values for the
// chosen concept:
//   common     — generations 200, population 250, steps 50, 6 qubits,
//                mutation rate 0.1, seeds {0..4}
//   fixed      — 4 layers, sigma_p 0.01, truncation tau 5
//   layer      — 1 initial layer, sigma_p 0.05, sigma_a 10
//   prototype  — 8 layers of 18 gates, sigma_p 0.05, sigma_a 10
//   gate       — 70 initial gates, sigma_p 0.01, sigma_a 1
//   nn         — hidden sizes 64/64, sigma_p 0.01, truncation tau 5
// Tournament strategies default tau to 40% of the population.
struct ExperimentConfig {
    Concept kind = Concept::Gate;
    std::string strategy = "mu";  // mu | raremu | laremu | archremu
    int generations = -1;
    int population = -1;
    int steps = -1;
    int tau = -1;
    double sigma_params = -1.0;
    double sigma_arch = -1.0;
    double mutation_rate = -1.0;
    int num_qubits = -1;
    int layers = -1;
    int gates = -1;
    int hidden1 = -1;
    int hidden2 = -1;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    int jobs = 0;  // 0 = hardware concurrency
    bool fixed_eval_seed = false;
    int checkpoint_every = 0;  // 0 = final checkpoint only

    void apply_defaults();
    void validate() const;

    Strategy resolved_strategy() const;
    EvoConfig evo() const;

    // "<concept>_<strategy>", used in output file names.
    std::string run_tag() const;
    std::string metrics_path() const;
    std::string timing_path() const;
    std::string checkpoint_path(std::uint64_t seed) const;

    static ExperimentConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    static ExperimentConfig load(const std::string& path);
};

// One metrics row. best_* columns describe the generation's elite
// individual (same tie-breaking as elitism); avg_* are population means.
struct GenerationRecord {
    int generation = 0;
    std::uint64_t seed = 0;
    double best_score = 0.0;
    double avg_score = 0.0;
    int best_total_coins = 0;
    double avg_total_coins = 0.0;
    int best_own_coins = 0;
    double avg_own_coins = 0.0;
    double best_own_coin_rate = 0.0;
    double avg_own_coin_rate = 0.0;
    int best_gates_total = 0;
    int best_gates_param = 0;
    int best_param_count = 0;
    double wall_seconds = 0.0;  // written to the timing sidecar only
};

GenerationRecord make_record(int generation, std::uint64_t seed, const Population& population,
                             double wall_seconds);

// Column order of the metrics CSV (wall-clock time goes to a separate
// timing CSV so metrics files are byte-identical across reruns).
const std::vector<std::string>& metrics_columns();

void write_metrics_csv(const std::string& path, const std::vector<GenerationRecord>& records);
void write_timing_csv(const std::string& path, const std::vector<GenerationRecord>& records);

struct Checkpoint {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    int generation = 0;  // last evaluated generation
    Population population;
    std::vector<GenerationRecord> records;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// Runs one seed for config.generations generations (continuing from
// `resume` when given) and writes its checkpoint(s). Returns all records.
std::vector<GenerationRecord> run_seed(const ExperimentConfig& config, std::uint64_t seed,
                                       const Checkpoint* resume = nullptr);

struct ExperimentResult {
    std::vector<GenerationRecord> records;
    std::string metrics_path;
    std::string timing_path;
};

// Runs every configured seed and writes metrics, timing and checkpoints
// under config.out_dir. With resume=true, seeds whose checkpoint exists
// continue from it instead of starting over.
ExperimentResult run_experiment(const ExperimentConfig& config, bool resume = false);

// Cross-seed aggregation: per-generation mean and standard deviation
// (population form, so a single seed reports 0) of every metric column.
void aggregate_csv(const std::string& metrics_path, const std::string& out_path);

// Replays one self-play episode of the checkpoint's elite genome and writes
// a step-by-step trace. steps <= 0 uses the checkpoint's eval steps.
// Returns the episode stats.
EpisodeStats replay_best(const std::string& checkpoint_path, std::uint64_t seed, int steps,
                         std::ostream& trace);

}  // namespace qevo
