// qevo command line: run experiments, aggregate metrics across seeds,
// render charts, replay checkpointed agents.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qevo/experiment.hpp"
#include "qevo/svg_plot.hpp"

namespace {

struct RunFlags {
    std::string config_path;
    std::string concept_arg;
    std::string strategy;
    std::vector<std::uint64_t> seeds;
    int generations = 0, population = 0, steps = 0, tau = 0;
    double sigma_params = 0.0, sigma_arch = 0.0, mutation_rate = 0.0;
    int qubits = 0, layers = 0, gates = 0;
    std::vector<int> hidden;
    std::string out_dir;
    int jobs = 0, checkpoint_every = 0;
    bool fixed_eval_seed = false;
    bool resume = false;
};

int do_run(const CLI::App& cmd, const RunFlags& flags) {
    qevo::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = qevo::ExperimentConfig::load(flags.config_path);

    auto given = [&cmd](const std::string& name) { return cmd.count(name) > 0; };
    if (given("--concept")) cfg.kind = qevo::concept_from_name(flags.concept_arg);
    if (given("--strategy")) cfg.strategy = flags.strategy;
    if (given("--seed")) cfg.seeds = flags.seeds;
    if (given("--generations")) cfg.generations = flags.generations;
    if (given("--population")) cfg.population = flags.population;
    if (given("--steps")) cfg.steps = flags.steps;
    if (given("--tau")) cfg.tau = flags.tau;
    if (given("--sigma-params")) cfg.sigma_params = flags.sigma_params;
    if (given("--sigma-arch")) cfg.sigma_arch = flags.sigma_arch;
    if (given("--mutation-rate")) cfg.mutation_rate = flags.mutation_rate;
    if (given("--qubits")) cfg.num_qubits = flags.qubits;
    if (given("--layers")) cfg.layers = flags.layers;
    if (given("--gates")) cfg.gates = flags.gates;
    if (given("--hidden")) {
        if (flags.hidden.size() != 2) throw CLI::ValidationError("--hidden needs two sizes");
        cfg.hidden1 = flags.hidden[0];
        cfg.hidden2 = flags.hidden[1];
    }
    if (given("--out")) cfg.out_dir = flags.out_dir;
    if (given("--jobs")) cfg.jobs = flags.jobs;
    if (given("--checkpoint-every")) cfg.checkpoint_every = flags.checkpoint_every;
    if (flags.fixed_eval_seed) cfg.fixed_eval_seed = true;

    cfg.apply_defaults();
    cfg.validate();

    std::cout << "running " << cfg.run_tag() << ": generations=" << cfg.generations
              << " population=" << cfg.population << " steps=" << cfg.steps
              << " seeds=" << cfg.seeds.size() << "\n";
    const qevo::ExperimentResult result = qevo::run_experiment(cfg, flags.resume);

    for (const std::uint64_t seed : cfg.seeds) {
        const qevo::GenerationRecord* last = nullptr;
        for (const auto& rec : result.records)
            if (rec.seed == seed) last = &rec;
        if (last)
            std::cout << "seed " << seed << ": best score " << last->best_score
                      << " at generation " << last->generation << "\n";
    }
    std::cout << "metrics: " << result.metrics_path << "\n";
    std::cout << "timing:  " << result.timing_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary optimization of variational quantum circuit agents in the Coin Game"};
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Run an evolution experiment");
    run->add_option("--config", run_flags.config_path, "JSON config file");
    run->add_option("--concept", run_flags.concept_arg,
                    "fixed | layer | gate | prototype | nn | random");
    run->add_option("--strategy", run_flags.strategy, "mu | raremu | laremu | archremu");
    run->add_option("--seed", run_flags.seeds, "seed list (repeatable)");
    run->add_option("--generations", run_flags.generations, "number of generations");
    run->add_option("--population", run_flags.population, "population size");
    run->add_option("--steps", run_flags.steps, "environment steps per evaluation episode");
    run->add_option("--tau", run_flags.tau, "truncation count or tournament size");
    run->add_option("--sigma-params", run_flags.sigma_params, "parameter mutation power");
    run->add_option("--sigma-arch", run_flags.sigma_arch, "architecture mutation power");
    run->add_option("--mutation-rate", run_flags.mutation_rate, "per-parameter mutation rate");
    run->add_option("--qubits", run_flags.qubits, "circuit width");
    run->add_option("--layers", run_flags.layers, "layer count (fixed/layer/prototype concepts)");
    run->add_option("--gates", run_flags.gates, "gate count (gate/prototype concepts)");
    run->add_option("--hidden", run_flags.hidden, "two hidden layer sizes (nn concept)")
        ->expected(2);
    run->add_option("--out", run_flags.out_dir, "output directory");
    run->add_option("--jobs", run_flags.jobs, "parallel evaluations (0 = all cores)");
    run->add_option("--checkpoint-every", run_flags.checkpoint_every,
                    "checkpoint every N generations (0 = final only)");
    run->add_flag("--fixed-eval-seed", run_flags.fixed_eval_seed,
                  "evaluate every individual on one fixed episode seed");
    run->add_flag("--resume", run_flags.resume, "continue from checkpoints in the output directory");

    std::string agg_in, agg_out;
    CLI::App* aggregate = app.add_subcommand("aggregate", "Average metrics across seeds");
    aggregate->add_option("--in", agg_in, "metrics CSV")->required();
    aggregate->add_option("--out", agg_out, "output CSV")->required();

    std::vector<std::string> plot_ins, plot_labels;
    std::string plot_out;
    CLI::App* plot = app.add_subcommand("plot", "Render SVG charts from aggregated metrics");
    plot->add_option("--in", plot_ins, "aggregate CSV (repeatable)")->required();
    plot->add_option("--label", plot_labels, "legend label per input");
    plot->add_option("--out", plot_out, "output directory")->required();

    std::string replay_ckpt, replay_out;
    std::uint64_t replay_seed = 0;
    int replay_steps = 0;
    CLI::App* replay = app.add_subcommand("replay", "Replay the best agent of a checkpoint");
    replay->add_option("--checkpoint", replay_ckpt, "checkpoint JSON")->required();
    replay->add_option("--seed", replay_seed, "episode seed")->required();
    replay->add_option("--steps", replay_steps, "episode length (default: config steps)");
    replay->add_option("--out", replay_out, "trace file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(*run, run_flags);

        if (aggregate->parsed()) {
            qevo::aggregate_csv(agg_in, agg_out);
            std::cout << "wrote " << agg_out << "\n";
            return 0;
        }

        if (plot->parsed()) {
            std::vector<qevo::AggregateInput> inputs;
            for (std::size_t i = 0; i < plot_ins.size(); ++i) {
                std::string label = i < plot_labels.size()
                                        ? plot_labels[i]
                                        : std::filesystem::path(plot_ins[i]).stem().string();
                inputs.push_back({std::move(label), plot_ins[i]});
            }
            for (const std::string& path : qevo::render_plots(inputs, plot_out))
                std::cout << "wrote " << path << "\n";
            return 0;
        }

        if (replay->parsed()) {
            if (replay_out.empty()) {
                qevo::replay_best(replay_ckpt, replay_seed, replay_steps, std::cout);
            } else {
                std::ofstream out(replay_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + replay_out);
                qevo::replay_best(replay_ckpt, replay_seed, replay_steps, out);
                std::cout << "wrote " << replay_out << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
