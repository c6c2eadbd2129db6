#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qevo/coin_game.hpp"
#include "qevo/genome.hpp"
#include "qevo/policy.hpp"

namespace qevo {

// How the next generation is produced.
//   Mu      — truncation selection, parameter mutation only.
//   RaReMu  — truncation selection, random-point crossover, rate mutation.
//   LaReMu  — truncation selection, layer-boundary crossover, rate mutation.
//   ArchMu  — tournament selection, parameter noise plus one architecture
//             edit batch per child.
//   ArchReMu— tournament selection, architecture crossover, rate mutation
//             plus a rate-gated architecture edit batch.
enum class Strategy { Mu, RaReMu, LaReMu, ArchMu, ArchReMu };

const char* strategy_name(Strategy s);

struct Individual {
    Genome genome;
    double fitness = 0.0;
    EpisodeStats stats;
};

using Population = std::vector<Individual>;

struct EvoConfig {
    int generations = 200;
    int population_size = 250;
    int eval_steps = 50;      // even; each agent takes half the turns
    int selection_size = 5;   // truncation count or tournament size
    double sigma_params = 0.01;
    double sigma_arch = 1.0;
    double mutation_rate = 0.1;
    Strategy strategy = Strategy::Mu;
    bool fixed_eval_seed = false;
    GenomeConfig genome;

    void validate() const;
};

// Called once per environment step during an episode (used for traces).
struct StepTrace {
    CoinGameState before;
    int action = -1;  // -1 when the turn passed with no legal move
    std::array<int, kNumAgents> rewards{0, 0};
    CoinGameState after;
};
using StepCallback = std::function<void(const StepTrace&)>;

// Self-play episode: one policy drives both agents, alternating turns for
// `steps` environment steps. The seed fixes the episode completely (resets,
// coin spawns and any stochastic policy choices draw from one stream).
EpisodeStats play_episode(Policy& policy, int steps, std::uint64_t env_seed,
                          const StepCallback* on_step = nullptr);

// Fitness of an evaluated episode: the utilitarian score, i.e. the sum of
// both agents' rewards.
inline double fitness_of(const EpisodeStats& stats) {
    return static_cast<double>(stats.rewards[0] + stats.rewards[1]);
}

// Episode seed for one individual. With fixed_eval_seed every individual in
// every generation plays the same episode seed, which makes fitness a pure
// function of the genome (and best-of-generation monotone under elitism).
std::uint64_t episode_seed(std::uint64_t master_seed, int generation, int individual,
                           bool fixed_eval_seed);

// Evaluates genome `individual` of a generation on one self-play episode.
EpisodeStats evaluate_fitness(const Genome& genome, int steps, std::uint64_t env_seed);

// Evaluates the whole population, `jobs` episodes at a time (0 = hardware
// concurrency). Results are identical for any parallelism degree.
void evaluate_population(Population& population, const EvoConfig& config,
                         std::uint64_t master_seed, int generation, int jobs);

// Indices of the `count` fittest individuals, ties to the lower index.
std::vector<std::size_t> truncation_select(const Population& population, int count);

// Fittest of `tournament_size` distinct uniform draws, ties to the lower index.
std::size_t tournament_select(const Population& population, int tournament_size, Rng& rng);

// Index of the elite: best fitness, ties by fewer total gates, then fewer
// parameters, then lower index.
std::size_t elite_index(const Population& population);

// Adds N(0, sigma^2) noise to every parameter (angles and biases, or NN
// weights). Angles are not re-wrapped; rotations are 2*pi-periodic.
Genome mutate_params(Genome genome, double sigma, Rng& rng);

// Like mutate_params but each parameter is touched independently with
// probability `rate`.
Genome mutate_params_with_rate(Genome genome, double sigma, double rate, Rng& rng);

// Structural mutation: draws k = max(1, round(|N(0, sigma_arch^2)|)) edits.
// Layer genomes insert or delete whole layers; Gate genomes insert, delete
// or replace single gates; Prototype genomes apply the gate edits to the
// prototype (angle slots for all repetitions follow). A delete that would
// empty the genome becomes an insert.
Genome mutate_architecture(Genome genome, double sigma_arch, Rng& rng);

// Single-point crossover on the flat parameter vector (identical
// architectures required); returns both offspring.
std::pair<Genome, Genome> recombine_random_point(const Genome& a, const Genome& b, Rng& rng);

// Crossover restricted to layer boundaries of a fixed-architecture circuit.
std::pair<Genome, Genome> recombine_layerwise(const Genome& a, const Genome& b, Rng& rng);

// Crossover on whole units (layers / gates / prototype gates): a shared cut
// strictly inside both parents, front of one plus back of the other. Two
// single-unit parents concatenate, so offspring are never empty. Prototype
// offspring re-instantiate all repetitions of the recombined prototype with
// per-instance angles recombined at the matching positions.
std::pair<Genome, Genome> recombine_architecture(const Genome& a, const Genome& b, Rng& rng);

// Builds generation g+1 from the evaluated generation g: eta - 1 children
// per the configured strategy plus the unaltered elite appended last.
// Deterministic given (population, config, master_seed, generation).
Population next_generation(const Population& population, const EvoConfig& config,
                           std::uint64_t master_seed, int generation);

// Fresh generation-0 population.
Population init_population(const EvoConfig& config, std::uint64_t master_seed);

}  // namespace qevo
