// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qevo/evolution.hpp"
#include "qevo/experiment.hpp"
#include "qevo/serialize.hpp"
#include "support/dense_oracle.hpp"

using namespace qevo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[PASS] %s (%.1fs)\n", name.c_str(), secs);
    } catch (const std::exception& e) {
        ++g_failures;
        std::printf("[FAIL] %s: %s\n", name.c_str(), e.what());
    }
    std::fflush(stdout);
}

void expect(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

std::string num(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    expect(static_cast<bool>(in), "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qevo_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

double random_baseline_mean(int episodes, std::uint64_t base_seed) {
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
        const EpisodeStats stats = evaluate_fitness(
            RandomGenome{}, 50, mix_seed({base_seed, static_cast<std::uint64_t>(e)}));
        total += fitness_of(stats);
    }
    return total / episodes;
}

// --- criteria ---

void parameter_count_formula() {
    const int layer_counts[] = {4, 6, 8, 16};
    const int expected[] = {76, 112, 148, 292};
    Rng rng(0);
    for (int i = 0; i < 4; ++i) {
        FixedGenome fixed;
        fixed.num_qubits = 6;
        fixed.num_layers = layer_counts[i];
        fixed.thetas.assign(static_cast<std::size_t>(18 * layer_counts[i]), 0.0);
        expect(param_count(Genome{fixed}) == expected[i],
               "fixed circuit with " + num(layer_counts[i]) + " layers reported " +
                   num(param_count(Genome{fixed})) + " params, expected " + num(expected[i]));

        const Genome layer = random_init({Concept::Layer, 6, layer_counts[i], 1, 64, 64}, rng);
        expect(param_count(layer) == expected[i],
               "layer circuit with " + num(layer_counts[i]) + " layers reported " +
                   num(param_count(layer)) + " params, expected " + num(expected[i]));
    }
}

void nn_parameter_counts() {
    NNGenome small;
    small.hidden1 = 3;
    small.hidden2 = 4;
    expect(param_count(Genome{small}) == 147,
           "nn(3,4) reported " + num(param_count(Genome{small})) + " params, expected 147");
    NNGenome large;
    large.hidden1 = 64;
    large.hidden2 = 64;
    expect(param_count(Genome{large}) == 6788,
           "nn(64,64) reported " + num(param_count(Genome{large})) + " params, expected 6788");
}

void initial_size_figures() {
    Rng rng(1);
    const Genome layer = random_init({Concept::Layer, 6, 1, 1, 64, 64}, rng);
    expect(param_count(layer) == 22,
           "one-layer circuit reported " + num(param_count(layer)) + " params, expected 22");

    const int inits = 500;
    long long proto_param_gates = 0;
    for (int i = 0; i < inits; ++i) {
        const Genome g = random_init({Concept::Prototype, 6, 8, 18, 64, 64}, rng);
        expect(gate_count(g).total == 144,
               "prototype 8x18 has " + num(gate_count(g).total) + " gates, expected 144");
        proto_param_gates += gate_count(g).parameterized;
    }
    const double proto_mean = static_cast<double>(proto_param_gates) / inits;
    expect(std::abs(proto_mean - 108.0) <= 5.0,
           "prototype parameterized-gate mean " + num(proto_mean) + " outside 108 +- 5");

    long long gate_param_gates = 0;
    for (int i = 0; i < inits; ++i) {
        const Genome g = random_init({Concept::Gate, 6, 1, 70, 64, 64}, rng);
        gate_param_gates += gate_count(g).parameterized;
    }
    const double gate_mean = static_cast<double>(gate_param_gates) / inits;
    expect(std::abs(gate_mean - 52.5) <= 2.0,
           "gate-based parameterized-gate mean " + num(gate_mean) + " outside 52.5 +- 2");
}

void zero_sum_random_baseline() {
    const double mean = random_baseline_mean(10000, 2024);
    expect(std::abs(mean) <= 0.3,
           "random self-play mean score " + num(mean) + " outside +-0.3");
}

void quantum_core_oracle() {
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + rng.uniform_int(3);
        const int len = 1 + rng.uniform_int(12);
        std::vector<GateOp> gates;
        for (int i = 0; i < len; ++i) gates.push_back(dense_oracle::random_test_gate(n, rng));

        Statevector state(n);
        std::vector<std::complex<double>> ref(state.dim(), {0, 0});
        ref[0] = {1, 0};
        for (const GateOp& g : gates) state.apply(g);
        ref = dense_oracle::run(gates, std::move(ref), n);
        for (std::size_t k = 0; k < ref.size(); ++k)
            worst = std::max(worst, std::abs(state[k] - ref[k]));
    }
    expect(worst < 1e-10, "worst amplitude deviation " + num(worst) + " >= 1e-10");

    Statevector state(6);
    state.apply(GateOp::ry(2, 0.921));
    double drift = 0.0;
    for (int i = 0; i < 10000; ++i) {
        state.apply(random_gate(6, rng));
        if (i % 500 == 0) drift = std::max(drift, std::abs(state.norm_sq() - 1.0));
    }
    drift = std::max(drift, std::abs(state.norm_sq() - 1.0));
    expect(drift < 1e-9, "norm drift " + num(drift) + " >= 1e-9 over 10^4 gates");
}

void conservation_identity() {
    // play_episode enforces score == 2*own - total on every episode it runs;
    // exercise it across policies and verify the arithmetic here as well.
    Rng rng(3);
    for (int e = 0; e < 2000; ++e) {
        const Genome genome =
            e % 2 == 0 ? Genome{RandomGenome{}}
                       : random_init({Concept::Gate, 6, 1, 15, 64, 64}, rng);
        const EpisodeStats stats =
            evaluate_fitness(genome, 50, mix_seed({11, static_cast<std::uint64_t>(e)}));
        const EpisodeMetrics m = episode_metrics(stats);
        expect(m.score == 2 * m.own_coins - m.total_coins,
               "episode " + num(e) + ": score " + num(m.score) + " != 2*" + num(m.own_coins) +
                   " - " + num(m.total_coins));
        expect(m.own_coins <= m.total_coins, "own coins exceed total coins");
    }
}

void desk_scale_learning() {
    ExperimentConfig cfg;
    cfg.kind = Concept::Gate;
    cfg.strategy = "mu";
    cfg.generations = 30;
    cfg.population = 20;
    cfg.steps = 50;
    cfg.seeds = {0, 1, 2};
    cfg.fixed_eval_seed = true;
    cfg.out_dir = fresh_dir("desk_scale");
    cfg.jobs = 0;
    cfg.apply_defaults();
    cfg.validate();

    const ExperimentResult result = run_experiment(cfg);
    const double random_mean = random_baseline_mean(2000, 9090);

    double final_best_sum = 0.0;
    for (const std::uint64_t seed : cfg.seeds) {
        double previous = -1e18;
        double final_best = 0.0;
        for (const GenerationRecord& rec : result.records) {
            if (rec.seed != seed) continue;
            expect(rec.best_score >= previous,
                   "seed " + num(seed) + " best score fell from " + num(previous) + " to " +
                       num(rec.best_score) + " at generation " + num(rec.generation));
            previous = rec.best_score;
            if (rec.generation == cfg.generations - 1) final_best = rec.best_score;
        }
        final_best_sum += final_best;
    }
    const double mean_best = final_best_sum / static_cast<double>(cfg.seeds.size());
    expect(mean_best >= random_mean + 2.0,
           "mean best score " + num(mean_best) + " does not beat random mean " +
               num(random_mean) + " by 2");
}

void operator_identities() {
    Rng rng(5);
    const Genome gate = random_init({Concept::Gate, 6, 1, 30, 64, 64}, rng);
    const Genome zero_sigma = mutate_params(gate, 0.0, rng);
    expect(flat_params(zero_sigma) == flat_params(gate), "sigma=0 mutation changed parameters");

    const Genome zero_rate = mutate_params_with_rate(gate, 0.5, 0.0, rng);
    expect(flat_params(zero_rate) == flat_params(gate), "rate=0 mutation changed parameters");

    const Genome fixed = random_init({Concept::Fixed, 6, 4, 1, 64, 64}, rng);
    const auto [r1, r2] = recombine_random_point(fixed, fixed, rng);
    expect(flat_params(r1) == flat_params(fixed) && flat_params(r2) == flat_params(fixed),
           "random-point crossover of identical parents changed the genome");
    const auto [l1, l2] = recombine_layerwise(fixed, fixed, rng);
    expect(flat_params(l1) == flat_params(fixed) && flat_params(l2) == flat_params(fixed),
           "layerwise crossover of identical parents changed the genome");
    const auto [a1, a2] = recombine_architecture(gate, gate, rng);
    expect(lower(a1) == lower(gate) && lower(a2) == lower(gate),
           "architecture crossover of identical parents changed the circuit");

    EvoConfig evo;
    evo.generations = 2;
    evo.population_size = 10;
    evo.eval_steps = 50;
    evo.selection_size = 4;
    evo.sigma_params = 0.05;
    evo.sigma_arch = 1.0;
    evo.mutation_rate = 0.1;
    evo.strategy = Strategy::ArchMu;
    evo.genome = GenomeConfig{Concept::Gate, 6, 1, 20, 64, 64};
    Population pop = init_population(evo, 77);
    evaluate_population(pop, evo, 77, 0, 1);
    const std::size_t elite = elite_index(pop);
    const std::string elite_doc = genome_to_string(pop[elite].genome);
    const Population next = next_generation(pop, evo, 77, 0);
    expect(genome_to_string(next.back().genome) == elite_doc,
           "elitism did not carry the elite genome bit-exactly");
    expect(next.back().fitness == pop[elite].fitness, "elitism dropped the elite fitness");
}

void csv_determinism() {
    ExperimentConfig cfg;
    cfg.kind = Concept::Gate;
    cfg.strategy = "mu";
    cfg.generations = 5;
    cfg.population = 12;
    cfg.steps = 50;
    cfg.gates = 25;
    cfg.seeds = {0, 1};
    cfg.jobs = 1;
    cfg.out_dir = fresh_dir("det_run1");
    cfg.apply_defaults();

    ExperimentConfig rerun = cfg;
    rerun.out_dir = fresh_dir("det_run2");
    ExperimentConfig parallel = cfg;
    parallel.out_dir = fresh_dir("det_run8");
    parallel.jobs = 8;

    const auto a = run_experiment(cfg);
    const auto b = run_experiment(rerun);
    const auto c = run_experiment(parallel);
    expect(slurp(a.metrics_path) == slurp(b.metrics_path),
           "two serial runs produced different metrics CSVs");
    expect(slurp(a.metrics_path) == slurp(c.metrics_path),
           "parallelism 8 produced a different metrics CSV than parallelism 1");
}

// Straight-line restatement of the movement and reward rules, sharing no
// code with the environment.
struct OracleStep {
    bool legal = false;
    int dest = -1;
    int reward0 = 0, reward1 = 0;
};

OracleStep oracle_step(int a0, int a1, int coin, int color, int turn, int action) {
    OracleStep out;
    const int self = turn == 0 ? a0 : a1;
    const int other = turn == 0 ? a1 : a0;
    const int row = self / 3, col = self % 3;
    int dest = -1;
    if (action == 0 && row > 0) dest = self - 3;
    if (action == 1 && row < 2) dest = self + 3;
    if (action == 2 && col > 0) dest = self - 1;
    if (action == 3 && col < 2) dest = self + 1;
    if (dest < 0 || dest == other) return out;
    out.legal = true;
    out.dest = dest;
    if (dest == coin) {
        if (turn == 0) {
            out.reward0 = 1;
            if (color == 1) out.reward1 = -2;
        } else {
            out.reward1 = 1;
            if (color == 0) out.reward0 = -2;
        }
    }
    return out;
}

void reward_table_exhaustive() {
    Rng rng(13);
    int checked = 0;
    for (int a0 = 0; a0 < 9; ++a0)
        for (int a1 = 0; a1 < 9; ++a1) {
            if (a1 == a0) continue;
            for (int coin = 0; coin < 9; ++coin)
                for (int color = 0; color < 2; ++color)
                    for (int turn = 0; turn < 2; ++turn) {
                        CoinGameState s;
                        s.agent_pos = {a0, a1};
                        s.coin_pos = coin;
                        s.coin_color = color;
                        s.turn = turn;
                        const ActionMask mask = legal_actions(s, turn);
                        for (int action = 0; action < 4; ++action) {
                            const OracleStep want = oracle_step(a0, a1, coin, color, turn, action);
                            expect(mask[static_cast<std::size_t>(action)] == want.legal,
                                   "legality mismatch at state " + num(a0) + "," + num(a1) + "," +
                                       num(coin) + " action " + num(action));
                            if (!want.legal) {
                                bool threw = false;
                                try {
                                    step_coin_game(s, action, rng);
                                } catch (const std::invalid_argument&) {
                                    threw = true;
                                }
                                expect(threw, "illegal action did not throw");
                                continue;
                            }
                            const StepOutcome out = step_coin_game(s, action, rng);
                            expect(out.rewards[0] == want.reward0 && out.rewards[1] == want.reward1,
                                   "reward mismatch: got (" + num(out.rewards[0]) + "," +
                                       num(out.rewards[1]) + "), want (" + num(want.reward0) +
                                       "," + num(want.reward1) + ")");
                            expect(out.state.agent_pos[static_cast<std::size_t>(turn)] == want.dest,
                                   "agent did not move to the expected cell");
                            expect(out.state.turn == 1 - turn && out.state.step == s.step + 1,
                                   "turn/step bookkeeping wrong");
                            if (want.dest == coin) {
                                expect(out.coin_collected, "collection not flagged");
                                expect(out.state.coin_pos != out.state.agent_pos[0] &&
                                           out.state.coin_pos != out.state.agent_pos[1],
                                       "respawned coin landed on an agent");
                            } else {
                                expect(out.state.coin_pos == coin && out.state.coin_color == color,
                                       "coin moved without a collection");
                            }
                            ++checked;
                        }
                    }
        }
    expect(checked > 0, "no states checked");
}

}  // namespace

int main() {
    std::printf("qevo acceptance suite\n");

    criterion("parameter-count formula: 4/6/8/16 layers give 76/112/148/292 parameters",
              parameter_count_formula);
    criterion("nn baselines: hidden (3,4) has 147 parameters, (64,64) has 6788",
              nn_parameter_counts);
    criterion("initial sizes: layer=22 params; prototype 144 gates, ~108 parameterized; "
              "gate ~52.5 parameterized",
              initial_size_figures);
    criterion("zero-sum random baseline: mean score within +-0.3 over 10^4 episodes",
              zero_sum_random_baseline);
    criterion("quantum core: dense-matrix oracle within 1e-10; norm drift < 1e-9 over 10^4 gates",
              quantum_core_oracle);
    criterion("conservation identity: score == 2*own - total on every evaluated episode",
              conservation_identity);
    criterion("desk-scale learning: gate-based mutation-only beats random by >= 2 with "
              "monotone best fitness",
              desk_scale_learning);
    criterion("operator identities: sigma=0 / rate=0 / identical-parent crossover / "
              "bit-exact elitism",
              operator_identities);
    criterion("determinism: byte-identical metrics CSVs at parallelism 1 and 8",
              csv_determinism);
    criterion("reward table: exhaustive states x actions match the rules oracle",
              reward_table_exhaustive);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
