#include "qevo/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <mutex>
#include <thread>

namespace qevo {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Mu: return "mu";
        case Strategy::RaReMu: return "raremu";
        case Strategy::LaReMu: return "laremu";
        case Strategy::ArchMu: return "archmu";
        case Strategy::ArchReMu: return "archremu";
    }
    throw std::logic_error("unknown strategy");
}

void EvoConfig::validate() const {
    genome.validate();
    if (generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (population_size < 1) throw std::invalid_argument("population size must be >= 1");
    if (eval_steps < 1 || eval_steps % 2 != 0)
        throw std::invalid_argument("eval steps must be positive and even");
    if (selection_size < 1 || selection_size > population_size)
        throw std::invalid_argument("selection size must be in [1, population size]");
    if (sigma_params < 0.0) throw std::invalid_argument("sigma_params must be >= 0");
    if (sigma_arch < 0.0) throw std::invalid_argument("sigma_arch must be >= 0");
    if (mutation_rate < 0.0 || mutation_rate > 1.0)
        throw std::invalid_argument("mutation rate must be in [0, 1]");

    const Concept c = genome.kind;
    switch (strategy) {
        case Strategy::Mu:
            break;  // parameter mutation applies to every concept
        case Strategy::RaReMu:
        case Strategy::LaReMu:
            if (c != Concept::Fixed)
                throw std::invalid_argument("parameter crossover needs the fixed concept");
            break;
        case Strategy::ArchMu:
        case Strategy::ArchReMu:
            if (c != Concept::Layer && c != Concept::Gate && c != Concept::Prototype)
                throw std::invalid_argument(
                    "architecture strategies need a layer/gate/prototype concept");
            break;
    }
}

std::uint64_t episode_seed(std::uint64_t master_seed, int generation, int individual,
                           bool fixed_eval_seed) {
    if (fixed_eval_seed) return mix_seed({master_seed, kSeedEval});
    return mix_seed({master_seed, kSeedEval, static_cast<std::uint64_t>(generation),
                     static_cast<std::uint64_t>(individual)});
}

EpisodeStats play_episode(Policy& policy, int steps, std::uint64_t env_seed,
                          const StepCallback* on_step) {
    if (steps < 1) throw std::invalid_argument("episode needs at least one step");
    Rng rng(env_seed);
    CoinGameState state = reset_coin_game(rng);
    EpisodeStats stats;
    for (int t = 0; t < steps; ++t) {
        const int agent = state.turn;
        const ActionMask mask = legal_actions(state, agent);
        if (!any_legal(mask)) {
            const CoinGameState next = pass_turn(state);
            if (on_step) (*on_step)({state, -1, {0, 0}, next});
            state = next;
            continue;
        }
        const Observation obs = encode_observation(state, agent);
        const int action = policy.act(obs, mask, rng);
        const StepOutcome out = step_coin_game(state, action, rng);
        stats.rewards[0] += out.rewards[0];
        stats.rewards[1] += out.rewards[1];
        if (out.coin_collected) {
            ++stats.coins[static_cast<std::size_t>(agent)];
            if (out.own_coin) ++stats.own_coins[static_cast<std::size_t>(agent)];
        }
        if (on_step) (*on_step)({state, action, out.rewards, out.state});
        state = out.state;
    }
    const EpisodeMetrics m = episode_metrics(stats);
    if (m.score != 2 * m.own_coins - m.total_coins)
        throw std::logic_error("episode accounting violated score == 2*own - total");
    return stats;
}

EpisodeStats evaluate_fitness(const Genome& genome, int steps, std::uint64_t env_seed) {
    const auto policy = make_policy(genome);
    return play_episode(*policy, steps, env_seed);
}

void evaluate_population(Population& population, const EvoConfig& config,
                         std::uint64_t master_seed, int generation, int jobs) {
    const int n = static_cast<int>(population.size());
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, std::max(1, n));

    std::atomic<int> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        try {
            for (;;) {
                const int i = cursor.fetch_add(1);
                if (i >= n) return;
                Individual& ind = population[static_cast<std::size_t>(i)];
                const std::uint64_t seed =
                    episode_seed(master_seed, generation, i, config.fixed_eval_seed);
                ind.stats = evaluate_fitness(ind.genome, config.eval_steps, seed);
                ind.fitness = fitness_of(ind.stats);
            }
        } catch (...) {
            const std::scoped_lock lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::size_t> truncation_select(const Population& population, int count) {
    if (count < 1 || count > static_cast<int>(population.size()))
        throw std::invalid_argument("truncation count out of range");
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&population](std::size_t a, std::size_t b) {
        return population[a].fitness > population[b].fitness;
    });
    order.resize(static_cast<std::size_t>(count));
    return order;
}

std::size_t tournament_select(const Population& population, int tournament_size, Rng& rng) {
    const int n = static_cast<int>(population.size());
    if (tournament_size < 1 || tournament_size > n)
        throw std::invalid_argument("tournament size out of range");
    // Partial Fisher-Yates: the first tournament_size slots are a uniform
    // draw without replacement.
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::size_t best = 0;
    bool have_best = false;
    for (int j = 0; j < tournament_size; ++j) {
        const int swap_with = j + rng.uniform_int(n - j);
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(swap_with)]);
        const auto candidate = static_cast<std::size_t>(pool[static_cast<std::size_t>(j)]);
        if (!have_best || population[candidate].fitness > population[best].fitness ||
            (population[candidate].fitness == population[best].fitness && candidate < best)) {
            best = candidate;
            have_best = true;
        }
    }
    return best;
}

std::size_t elite_index(const Population& population) {
    if (population.empty()) throw std::invalid_argument("population is empty");
    std::size_t best = 0;
    GateCounts best_gates = gate_count(population[0].genome);
    int best_params = param_count(population[0].genome);
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].fitness < population[best].fitness) continue;
        const GateCounts gates = gate_count(population[i].genome);
        const int params = param_count(population[i].genome);
        const bool better =
            population[i].fitness > population[best].fitness ||
            gates.total < best_gates.total ||
            (gates.total == best_gates.total && params < best_params);
        if (better) {
            best = i;
            best_gates = gates;
            best_params = params;
        }
    }
    return best;
}

Genome mutate_params(Genome genome, double sigma, Rng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    for_each_param(genome, [&](double& p) { p += sigma * rng.normal(); });
    return genome;
}

Genome mutate_params_with_rate(Genome genome, double sigma, double rate, Rng& rng) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("rate must be in [0, 1]");
    for_each_param(genome, [&](double& p) {
        if (rng.uniform() < rate) p += sigma * rng.normal();
    });
    return genome;
}

namespace {

// One structural edit; a delete on a single-unit genome becomes an insert.
void edit_layer_genome(LayerGenome& g, Rng& rng) {
    const auto layers = static_cast<int>(g.layers.size());
    int choice = rng.uniform_int(2);  // 0 insert, 1 delete
    if (choice == 1 && layers == 1) choice = 0;
    if (choice == 0) {
        const int pos = rng.uniform_int(layers + 1);
        g.layers.insert(g.layers.begin() + pos, random_layer_angles(g.num_qubits, rng));
    } else {
        g.layers.erase(g.layers.begin() + rng.uniform_int(layers));
    }
}

void edit_gate_genome(GateGenome& g, Rng& rng) {
    const auto gates = static_cast<int>(g.gates.size());
    int choice = rng.uniform_int(3);  // 0 insert, 1 delete, 2 replace
    if (choice == 1 && gates == 1) choice = 0;
    switch (choice) {
        case 0: {
            const int pos = rng.uniform_int(gates + 1);
            g.gates.insert(g.gates.begin() + pos, random_gate(g.num_qubits, rng));
            break;
        }
        case 1:
            g.gates.erase(g.gates.begin() + rng.uniform_int(gates));
            break;
        default: {
            const int pos = rng.uniform_int(gates);
            g.gates[static_cast<std::size_t>(pos)] = random_gate(g.num_qubits, rng);
            break;
        }
    }
}

int rotations_before(const std::vector<ProtoGate>& prototype, std::size_t end) {
    int r = 0;
    for (std::size_t i = 0; i < end; ++i)
        if (is_rotation(prototype[i].kind)) ++r;
    return r;
}

// Removes the template gate at pos, dropping its angle slot in every
// repetition if it was a rotation.
void proto_delete_at(PrototypeGenome& g, int pos) {
    const int rot_total = rotations_before(g.prototype, g.prototype.size());
    if (is_rotation(g.prototype[static_cast<std::size_t>(pos)].kind)) {
        const int rot_idx = rotations_before(g.prototype, static_cast<std::size_t>(pos));
        std::vector<double> angles;
        angles.reserve(g.angles.size() - static_cast<std::size_t>(g.repetitions));
        for (int rep = 0; rep < g.repetitions; ++rep)
            for (int i = 0; i < rot_total; ++i)
                if (i != rot_idx) angles.push_back(g.angles[static_cast<std::size_t>(rep * rot_total + i)]);
        g.angles = std::move(angles);
    }
    g.prototype.erase(g.prototype.begin() + pos);
}

// Inserts a template gate at pos, drawing a fresh angle per repetition if it
// is a rotation.
void proto_insert_at(PrototypeGenome& g, int pos, const ProtoGate& gate, Rng& rng) {
    const int rot_total = rotations_before(g.prototype, g.prototype.size());
    if (is_rotation(gate.kind)) {
        const int rot_idx = rotations_before(g.prototype, static_cast<std::size_t>(pos));
        std::vector<double> angles;
        angles.reserve(g.angles.size() + static_cast<std::size_t>(g.repetitions));
        for (int rep = 0; rep < g.repetitions; ++rep) {
            for (int i = 0; i < rot_idx; ++i)
                angles.push_back(g.angles[static_cast<std::size_t>(rep * rot_total + i)]);
            angles.push_back(rng.uniform(-kPi, kPi));
            for (int i = rot_idx; i < rot_total; ++i)
                angles.push_back(g.angles[static_cast<std::size_t>(rep * rot_total + i)]);
        }
        g.angles = std::move(angles);
    }
    g.prototype.insert(g.prototype.begin() + pos, gate);
}

void edit_prototype_genome(PrototypeGenome& g, Rng& rng) {
    const auto gates = static_cast<int>(g.prototype.size());
    int choice = rng.uniform_int(3);
    if (choice == 1 && gates == 1) choice = 0;
    switch (choice) {
        case 0: {
            const int pos = rng.uniform_int(gates + 1);
            proto_insert_at(g, pos, random_gate_placement(g.num_qubits, rng), rng);
            break;
        }
        case 1:
            proto_delete_at(g, rng.uniform_int(gates));
            break;
        default: {
            const int pos = rng.uniform_int(gates);
            const ProtoGate fresh = random_gate_placement(g.num_qubits, rng);
            proto_delete_at(g, pos);
            proto_insert_at(g, pos, fresh, rng);
            break;
        }
    }
}

}  // namespace

Genome mutate_architecture(Genome genome, double sigma_arch, Rng& rng) {
    if (sigma_arch < 0.0) throw std::invalid_argument("sigma_arch must be >= 0");
    const auto edits =
        std::max<long long>(1, std::llround(std::abs(sigma_arch * rng.normal())));
    for (long long e = 0; e < edits; ++e) {
        if (auto* layer = std::get_if<LayerGenome>(&genome))
            edit_layer_genome(*layer, rng);
        else if (auto* gate = std::get_if<GateGenome>(&genome))
            edit_gate_genome(*gate, rng);
        else if (auto* proto = std::get_if<PrototypeGenome>(&genome))
            edit_prototype_genome(*proto, rng);
        else
            throw std::invalid_argument(
                "architecture mutation applies to layer/gate/prototype genomes");
    }
    return genome;
}

namespace {

std::pair<Genome, Genome> crossover_flat(const Genome& a, const Genome& b, std::size_t cut) {
    const auto pa = flat_params(a);
    const auto pb = flat_params(b);
    std::vector<double> c1(pa.begin(), pa.begin() + static_cast<std::ptrdiff_t>(cut));
    c1.insert(c1.end(), pb.begin() + static_cast<std::ptrdiff_t>(cut), pb.end());
    std::vector<double> c2(pb.begin(), pb.begin() + static_cast<std::ptrdiff_t>(cut));
    c2.insert(c2.end(), pa.begin() + static_cast<std::ptrdiff_t>(cut), pa.end());
    Genome o1 = a;
    Genome o2 = b;
    set_flat_params(o1, c1);
    set_flat_params(o2, c2);
    return {std::move(o1), std::move(o2)};
}

const FixedGenome& as_fixed(const Genome& g) {
    const auto* fixed = std::get_if<FixedGenome>(&g);
    if (!fixed) throw std::invalid_argument("parameter crossover needs fixed-concept parents");
    return *fixed;
}

}  // namespace

std::pair<Genome, Genome> recombine_random_point(const Genome& a, const Genome& b, Rng& rng) {
    const FixedGenome& fa = as_fixed(a);
    const FixedGenome& fb = as_fixed(b);
    if (fa.num_qubits != fb.num_qubits || fa.num_layers != fb.num_layers)
        throw std::invalid_argument("parents have mismatched architectures");
    const auto len = static_cast<std::size_t>(param_count(a));
    const std::size_t cut = 1 + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(len) - 1));
    return crossover_flat(a, b, cut);
}

std::pair<Genome, Genome> recombine_layerwise(const Genome& a, const Genome& b, Rng& rng) {
    const FixedGenome& fa = as_fixed(a);
    const FixedGenome& fb = as_fixed(b);
    if (fa.num_qubits != fb.num_qubits || fa.num_layers != fb.num_layers)
        throw std::invalid_argument("parents have mismatched architectures");
    // Cut after the chosen layer's 3n angles.
    const int layer = 1 + rng.uniform_int(fa.num_layers);
    const auto cut = static_cast<std::size_t>(3 * fa.num_qubits * layer);
    return crossover_flat(a, b, cut);
}

namespace {

// Shared unit-level cut for two parents: strictly inside both when possible,
// just after the first unit otherwise. Returns (front_cut_a, back_cut_b)
// pairs for both offspring via the caller.
std::size_t draw_unit_cut(std::size_t len_a, std::size_t len_b, Rng& rng) {
    const std::size_t m = std::min(len_a, len_b);
    if (m <= 1) return 1;
    return 1 + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(m) - 1));
}

template <typename Unit>
std::vector<Unit> splice(const std::vector<Unit>& front, std::size_t front_cut,
                         const std::vector<Unit>& back, std::size_t back_cut) {
    std::vector<Unit> out(front.begin(), front.begin() + static_cast<std::ptrdiff_t>(front_cut));
    out.insert(out.end(), back.begin() + static_cast<std::ptrdiff_t>(back_cut), back.end());
    return out;
}

PrototypeGenome splice_prototype(const PrototypeGenome& front, std::size_t front_cut,
                                 const PrototypeGenome& back, std::size_t back_cut) {
    PrototypeGenome out;
    out.num_qubits = front.num_qubits;
    out.repetitions = front.repetitions;
    out.prototype = splice(front.prototype, front_cut, back.prototype, back_cut);
    out.biases = front.biases;

    const int rot_front_total = rotations_before(front.prototype, front.prototype.size());
    const int rot_back_total = rotations_before(back.prototype, back.prototype.size());
    const int rot_front = rotations_before(front.prototype, front_cut);
    const int rot_back_skip = rotations_before(back.prototype, back_cut);
    out.angles.reserve(static_cast<std::size_t>(out.repetitions) *
                       static_cast<std::size_t>(rot_front + rot_back_total - rot_back_skip));
    for (int rep = 0; rep < out.repetitions; ++rep) {
        for (int i = 0; i < rot_front; ++i)
            out.angles.push_back(front.angles[static_cast<std::size_t>(rep * rot_front_total + i)]);
        for (int i = rot_back_skip; i < rot_back_total; ++i)
            out.angles.push_back(back.angles[static_cast<std::size_t>(rep * rot_back_total + i)]);
    }
    return out;
}

}  // namespace

std::pair<Genome, Genome> recombine_architecture(const Genome& a, const Genome& b, Rng& rng) {
    if (concept_of(a) != concept_of(b))
        throw std::invalid_argument("parents have different concepts");

    if (const auto* la = std::get_if<LayerGenome>(&a)) {
        const auto& lb = std::get<LayerGenome>(b);
        if (la->num_qubits != lb.num_qubits)
            throw std::invalid_argument("parents have different qubit counts");
        const bool both_single = la->layers.size() == 1 && lb.layers.size() == 1;
        const std::size_t cut = draw_unit_cut(la->layers.size(), lb.layers.size(), rng);
        const std::size_t back_cut = both_single ? 0 : cut;
        LayerGenome o1 = *la;
        o1.layers = splice(la->layers, cut, lb.layers, back_cut);
        LayerGenome o2 = lb;
        o2.layers = splice(lb.layers, cut, la->layers, back_cut);
        return {std::move(o1), std::move(o2)};
    }
    if (const auto* ga = std::get_if<GateGenome>(&a)) {
        const auto& gb = std::get<GateGenome>(b);
        if (ga->num_qubits != gb.num_qubits)
            throw std::invalid_argument("parents have different qubit counts");
        const bool both_single = ga->gates.size() == 1 && gb.gates.size() == 1;
        const std::size_t cut = draw_unit_cut(ga->gates.size(), gb.gates.size(), rng);
        const std::size_t back_cut = both_single ? 0 : cut;
        GateGenome o1 = *ga;
        o1.gates = splice(ga->gates, cut, gb.gates, back_cut);
        GateGenome o2 = gb;
        o2.gates = splice(gb.gates, cut, ga->gates, back_cut);
        return {std::move(o1), std::move(o2)};
    }
    if (const auto* pa = std::get_if<PrototypeGenome>(&a)) {
        const auto& pb = std::get<PrototypeGenome>(b);
        if (pa->num_qubits != pb.num_qubits)
            throw std::invalid_argument("parents have different qubit counts");
        if (pa->repetitions != pb.repetitions)
            throw std::invalid_argument("parents have different repetition counts");
        const bool both_single = pa->prototype.size() == 1 && pb.prototype.size() == 1;
        const std::size_t cut = draw_unit_cut(pa->prototype.size(), pb.prototype.size(), rng);
        const std::size_t back_cut = both_single ? 0 : cut;
        return {splice_prototype(*pa, cut, pb, back_cut), splice_prototype(pb, cut, *pa, back_cut)};
    }
    throw std::invalid_argument("architecture crossover needs layer/gate/prototype parents");
}

Population init_population(const EvoConfig& config, std::uint64_t master_seed) {
    config.validate();
    Population population(static_cast<std::size_t>(config.population_size));
    for (std::size_t i = 0; i < population.size(); ++i) {
        Rng rng(mix_seed({master_seed, kSeedInit, static_cast<std::uint64_t>(i)}));
        population[i].genome = random_init(config.genome, rng);
    }
    return population;
}

Population next_generation(const Population& population, const EvoConfig& config,
                           std::uint64_t master_seed, int generation) {
    config.validate();
    if (static_cast<int>(population.size()) != config.population_size)
        throw std::invalid_argument("population size does not match config");

    const int num_children = config.population_size - 1;
    const std::size_t elite = elite_index(population);
    Population next;
    next.reserve(population.size());

    auto child_rng = [&](int child) {
        return Rng(mix_seed({master_seed, kSeedChild, static_cast<std::uint64_t>(generation),
                             static_cast<std::uint64_t>(child)}));
    };
    auto push = [&next](Genome&& genome) { next.push_back({std::move(genome), 0.0, {}}); };

    switch (config.strategy) {
        case Strategy::Mu: {
            const auto parents = truncation_select(population, config.selection_size);
            for (int c = 0; c < num_children; ++c) {
                Rng rng = child_rng(c);
                const auto& parent =
                    population[parents[static_cast<std::size_t>(rng.uniform_int(config.selection_size))]];
                push(mutate_params(parent.genome, config.sigma_params, rng));
            }
            break;
        }
        case Strategy::RaReMu:
        case Strategy::LaReMu: {
            const auto parents = truncation_select(population, config.selection_size);
            const int tau = config.selection_size;
            for (int c = 0; c < num_children; c += 2) {
                Rng rng = child_rng(c);
                const int i = rng.uniform_int(tau);
                int j = i;
                if (tau > 1) {
                    j = rng.uniform_int(tau - 1);
                    if (j >= i) ++j;
                }
                const Genome& ga = population[parents[static_cast<std::size_t>(i)]].genome;
                const Genome& gb = population[parents[static_cast<std::size_t>(j)]].genome;
                auto offspring = config.strategy == Strategy::RaReMu
                                     ? recombine_random_point(ga, gb, rng)
                                     : recombine_layerwise(ga, gb, rng);
                push(mutate_params_with_rate(std::move(offspring.first), config.sigma_params,
                                             config.mutation_rate, rng));
                if (static_cast<int>(next.size()) < num_children)
                    push(mutate_params_with_rate(std::move(offspring.second), config.sigma_params,
                                                 config.mutation_rate, rng));
            }
            break;
        }
        case Strategy::ArchMu: {
            for (int c = 0; c < num_children; ++c) {
                Rng rng = child_rng(c);
                const auto& parent =
                    population[tournament_select(population, config.selection_size, rng)];
                Genome child = mutate_params(parent.genome, config.sigma_params, rng);
                push(mutate_architecture(std::move(child), config.sigma_arch, rng));
            }
            break;
        }
        case Strategy::ArchReMu: {
            for (int c = 0; c < num_children; c += 2) {
                Rng rng = child_rng(c);
                const auto& pa = population[tournament_select(population, config.selection_size, rng)];
                const auto& pb = population[tournament_select(population, config.selection_size, rng)];
                auto offspring = recombine_architecture(pa.genome, pb.genome, rng);
                auto finish = [&](Genome genome) {
                    genome = mutate_params_with_rate(std::move(genome), config.sigma_params,
                                                     config.mutation_rate, rng);
                    if (rng.uniform() < config.mutation_rate)
                        genome = mutate_architecture(std::move(genome), config.sigma_arch, rng);
                    return genome;
                };
                push(finish(std::move(offspring.first)));
                if (static_cast<int>(next.size()) < num_children)
                    push(finish(std::move(offspring.second)));
            }
            break;
        }
    }

    next.push_back(population[elite]);  // unaltered, keeps fitness and stats
    return next;
}

}  // namespace qevo
