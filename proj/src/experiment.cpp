#include "qevo/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qevo/csv.hpp"
#include "qevo/serialize.hpp"

namespace qevo {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::apply_defaults() {
    if (generations < 0) generations = 200;
    if (population < 0) population = 250;
    if (steps < 0) steps = 50;
    if (num_qubits < 0) num_qubits = 6;
    if (mutation_rate < 0.0) mutation_rate = 0.1;

    switch (kind) {
        case Concept::Fixed:
            if (layers < 0) layers = 4;
            if (sigma_params < 0.0) sigma_params = 0.01;
            break;
        case Concept::Layer:
            if (layers < 0) layers = 1;
            if (sigma_params < 0.0) sigma_params = 0.05;
            if (sigma_arch < 0.0) sigma_arch = 10.0;
            break;
        case Concept::Prototype:
            if (layers < 0) layers = 8;
            if (gates < 0) gates = 18;
            if (sigma_params < 0.0) sigma_params = 0.05;
            if (sigma_arch < 0.0) sigma_arch = 10.0;
            break;
        case Concept::Gate:
            if (gates < 0) gates = 70;
            if (sigma_params < 0.0) sigma_params = 0.01;
            if (sigma_arch < 0.0) sigma_arch = 1.0;
            break;
        case Concept::NN:
            if (hidden1 < 0) hidden1 = 64;
            if (hidden2 < 0) hidden2 = 64;
            if (sigma_params < 0.0) sigma_params = 0.01;
            break;
        case Concept::Random:
            if (sigma_params < 0.0) sigma_params = 0.0;
            break;
    }
    if (sigma_arch < 0.0) sigma_arch = 0.0;
    if (layers < 0) layers = 1;
    if (gates < 0) gates = 1;
    if (hidden1 < 0) hidden1 = 64;
    if (hidden2 < 0) hidden2 = 64;

    if (tau < 0) {
        const Strategy s = resolved_strategy();
        if (s == Strategy::ArchMu || s == Strategy::ArchReMu)
            tau = std::clamp(static_cast<int>(std::lround(0.4 * population)), 1, population);
        else
            tau = std::min(5, population);
    }
    if (seeds.empty()) seeds = {0, 1, 2, 3, 4};
}

Strategy ExperimentConfig::resolved_strategy() const {
    const bool arch_concept =
        kind == Concept::Layer || kind == Concept::Gate || kind == Concept::Prototype;
    if (strategy == "mu") return arch_concept ? Strategy::ArchMu : Strategy::Mu;
    if (strategy == "raremu") return Strategy::RaReMu;
    if (strategy == "laremu") return Strategy::LaReMu;
    if (strategy == "archremu") return Strategy::ArchReMu;
    throw std::invalid_argument("unknown strategy: " + strategy);
}

EvoConfig ExperimentConfig::evo() const {
    EvoConfig evo;
    evo.generations = generations;
    evo.population_size = population;
    evo.eval_steps = steps;
    evo.selection_size = tau;
    evo.sigma_params = sigma_params;
    evo.sigma_arch = sigma_arch;
    evo.mutation_rate = mutation_rate;
    evo.strategy = resolved_strategy();
    evo.fixed_eval_seed = fixed_eval_seed;
    evo.genome = GenomeConfig{kind, num_qubits, layers, gates, hidden1, hidden2};
    return evo;
}

void ExperimentConfig::validate() const {
    evo().validate();  // covers ranges and strategy/concept compatibility
    if (seeds.empty()) throw std::invalid_argument("no seeds configured");
    if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
    const bool vqc_concept = kind != Concept::NN && kind != Concept::Random;
    if (vqc_concept && (std::size_t{1} << num_qubits) < kObservationSize)
        throw std::invalid_argument("observation does not fit the circuit register");
}

std::string ExperimentConfig::run_tag() const {
    return std::string(concept_name(kind)) + "_" + strategy;
}

std::string ExperimentConfig::metrics_path() const {
    return (fs::path(out_dir) / ("metrics_" + run_tag() + ".csv")).string();
}

std::string ExperimentConfig::timing_path() const {
    return (fs::path(out_dir) / ("timing_" + run_tag() + ".csv")).string();
}

std::string ExperimentConfig::checkpoint_path(std::uint64_t seed) const {
    return (fs::path(out_dir) /
            ("checkpoint_" + run_tag() + "_seed" + format_int(static_cast<long long>(seed)) + ".json"))
        .string();
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    ExperimentConfig cfg;
    if (doc.contains("concept")) cfg.kind = concept_from_name(doc.at("concept").get<std::string>());
    if (doc.contains("strategy")) cfg.strategy = doc.at("strategy").get<std::string>();
    if (doc.contains("generations")) cfg.generations = doc.at("generations").get<int>();
    if (doc.contains("population")) cfg.population = doc.at("population").get<int>();
    if (doc.contains("steps")) cfg.steps = doc.at("steps").get<int>();
    if (doc.contains("tau")) cfg.tau = doc.at("tau").get<int>();
    if (doc.contains("sigma_params")) cfg.sigma_params = doc.at("sigma_params").get<double>();
    if (doc.contains("sigma_arch")) cfg.sigma_arch = doc.at("sigma_arch").get<double>();
    if (doc.contains("mutation_rate")) cfg.mutation_rate = doc.at("mutation_rate").get<double>();
    if (doc.contains("num_qubits")) cfg.num_qubits = doc.at("num_qubits").get<int>();
    if (doc.contains("layers")) cfg.layers = doc.at("layers").get<int>();
    if (doc.contains("gates")) cfg.gates = doc.at("gates").get<int>();
    if (doc.contains("hidden")) {
        const json& hidden = doc.at("hidden");
        if (hidden.size() != 2) throw std::invalid_argument("hidden must list two sizes");
        cfg.hidden1 = hidden.at(0).get<int>();
        cfg.hidden2 = hidden.at(1).get<int>();
    }
    if (doc.contains("seeds")) cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
    if (doc.contains("jobs")) cfg.jobs = doc.at("jobs").get<int>();
    if (doc.contains("fixed_eval_seed")) cfg.fixed_eval_seed = doc.at("fixed_eval_seed").get<bool>();
    if (doc.contains("checkpoint_every")) cfg.checkpoint_every = doc.at("checkpoint_every").get<int>();
    return cfg;
}

json ExperimentConfig::to_json() const {
    return json{{"concept", concept_name(kind)},
                {"strategy", strategy},
                {"generations", generations},
                {"population", population},
                {"steps", steps},
                {"tau", tau},
                {"sigma_params", sigma_params},
                {"sigma_arch", sigma_arch},
                {"mutation_rate", mutation_rate},
                {"num_qubits", num_qubits},
                {"layers", layers},
                {"gates", gates},
                {"hidden", json::array({hidden1, hidden2})},
                {"seeds", seeds},
                {"out", out_dir},
                {"jobs", jobs},
                {"fixed_eval_seed", fixed_eval_seed},
                {"checkpoint_every", checkpoint_every}};
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json doc;
    in >> doc;
    return from_json(doc);
}

GenerationRecord make_record(int generation, std::uint64_t seed, const Population& population,
                             double wall_seconds) {
    if (population.empty()) throw std::invalid_argument("population is empty");
    GenerationRecord rec;
    rec.generation = generation;
    rec.seed = seed;
    rec.wall_seconds = wall_seconds;

    const std::size_t elite = elite_index(population);
    const EpisodeMetrics best = episode_metrics(population[elite].stats);
    rec.best_score = population[elite].fitness;
    rec.best_total_coins = best.total_coins;
    rec.best_own_coins = best.own_coins;
    rec.best_own_coin_rate = best.own_coin_rate;
    const GateCounts gates = gate_count(population[elite].genome);
    rec.best_gates_total = gates.total;
    rec.best_gates_param = gates.parameterized;
    rec.best_param_count = param_count(population[elite].genome);

    double score_sum = 0.0, coins_sum = 0.0, own_sum = 0.0, ocr_sum = 0.0;
    for (const Individual& ind : population) {
        const EpisodeMetrics m = episode_metrics(ind.stats);
        score_sum += ind.fitness;
        coins_sum += m.total_coins;
        own_sum += m.own_coins;
        ocr_sum += m.own_coin_rate;
    }
    const auto n = static_cast<double>(population.size());
    rec.avg_score = score_sum / n;
    rec.avg_total_coins = coins_sum / n;
    rec.avg_own_coins = own_sum / n;
    rec.avg_own_coin_rate = ocr_sum / n;
    return rec;
}

const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> columns{
        "generation",          "seed",
        "best_score",          "avg_score",
        "best_total_coins",    "avg_total_coins",
        "best_own_coins",      "avg_own_coins",
        "best_own_coin_rate",  "avg_own_coin_rate",
        "best_gates_total",    "best_gates_param",
        "best_param_count"};
    return columns;
}

void write_metrics_csv(const std::string& path, const std::vector<GenerationRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const auto& cols = metrics_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const GenerationRecord& r : records) {
        out << format_int(r.generation) << ',' << format_int(static_cast<long long>(r.seed)) << ','
            << format_double(r.best_score) << ',' << format_double(r.avg_score) << ','
            << format_int(r.best_total_coins) << ',' << format_double(r.avg_total_coins) << ','
            << format_int(r.best_own_coins) << ',' << format_double(r.avg_own_coins) << ','
            << format_double(r.best_own_coin_rate) << ',' << format_double(r.avg_own_coin_rate)
            << ',' << format_int(r.best_gates_total) << ',' << format_int(r.best_gates_param)
            << ',' << format_int(r.best_param_count) << "\n";
    }
}

void write_timing_csv(const std::string& path, const std::vector<GenerationRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "generation,seed,wall_seconds\n";
    for (const GenerationRecord& r : records)
        out << format_int(r.generation) << ',' << format_int(static_cast<long long>(r.seed)) << ','
            << format_double(r.wall_seconds) << "\n";
}

namespace {

json record_to_json(const GenerationRecord& r) {
    return json{{"generation", r.generation},
                {"seed", r.seed},
                {"best_score", r.best_score},
                {"avg_score", r.avg_score},
                {"best_total_coins", r.best_total_coins},
                {"avg_total_coins", r.avg_total_coins},
                {"best_own_coins", r.best_own_coins},
                {"avg_own_coins", r.avg_own_coins},
                {"best_own_coin_rate", r.best_own_coin_rate},
                {"avg_own_coin_rate", r.avg_own_coin_rate},
                {"best_gates_total", r.best_gates_total},
                {"best_gates_param", r.best_gates_param},
                {"best_param_count", r.best_param_count},
                {"wall_seconds", r.wall_seconds}};
}

GenerationRecord record_from_json(const json& doc) {
    GenerationRecord r;
    r.generation = doc.at("generation").get<int>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.best_score = doc.at("best_score").get<double>();
    r.avg_score = doc.at("avg_score").get<double>();
    r.best_total_coins = doc.at("best_total_coins").get<int>();
    r.avg_total_coins = doc.at("avg_total_coins").get<double>();
    r.best_own_coins = doc.at("best_own_coins").get<int>();
    r.avg_own_coins = doc.at("avg_own_coins").get<double>();
    r.best_own_coin_rate = doc.at("best_own_coin_rate").get<double>();
    r.avg_own_coin_rate = doc.at("avg_own_coin_rate").get<double>();
    r.best_gates_total = doc.at("best_gates_total").get<int>();
    r.best_gates_param = doc.at("best_gates_param").get<int>();
    r.best_param_count = doc.at("best_param_count").get<int>();
    r.wall_seconds = doc.at("wall_seconds").get<double>();
    return r;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    json doc{{"schema", "qevo-checkpoint/1"},
             {"seed", checkpoint.seed},
             {"generation", checkpoint.generation},
             {"config", checkpoint.config.to_json()}};
    json population = json::array();
    for (const Individual& ind : checkpoint.population) {
        population.push_back(json{{"fitness", ind.fitness},
                                  {"rewards", ind.stats.rewards},
                                  {"coins", ind.stats.coins},
                                  {"own_coins", ind.stats.own_coins},
                                  {"genome", genome_to_json(ind.genome)}});
    }
    doc["population"] = std::move(population);
    json records = json::array();
    for (const GenerationRecord& r : checkpoint.records) records.push_back(record_to_json(r));
    doc["records"] = std::move(records);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump();
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("corrupt checkpoint " + path + ": " + e.what());
    }
    if (doc.value("schema", "") != "qevo-checkpoint/1")
        throw std::runtime_error("unknown checkpoint schema in " + path);

    Checkpoint ckpt;
    ckpt.config = ExperimentConfig::from_json(doc.at("config"));
    ckpt.config.apply_defaults();
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.generation = doc.at("generation").get<int>();
    for (const json& rec : doc.at("population")) {
        Individual ind;
        ind.fitness = rec.at("fitness").get<double>();
        ind.stats.rewards = rec.at("rewards").get<std::array<int, 2>>();
        ind.stats.coins = rec.at("coins").get<std::array<int, 2>>();
        ind.stats.own_coins = rec.at("own_coins").get<std::array<int, 2>>();
        ind.genome = genome_from_json(rec.at("genome"));
        ckpt.population.push_back(std::move(ind));
    }
    for (const json& rec : doc.at("records")) ckpt.records.push_back(record_from_json(rec));
    return ckpt;
}

std::vector<GenerationRecord> run_seed(const ExperimentConfig& config, std::uint64_t seed,
                                       const Checkpoint* resume) {
    const EvoConfig evo = config.evo();
    std::vector<GenerationRecord> records;
    Population pop;
    int start_gen = 0;

    if (resume) {
        records = resume->records;
        start_gen = resume->generation + 1;
        if (start_gen >= config.generations) return records;
        pop = next_generation(resume->population, evo, seed, resume->generation);
    } else {
        pop = init_population(evo, seed);
    }

    for (int g = start_gen; g < config.generations; ++g) {
        const auto t0 = std::chrono::steady_clock::now();
        evaluate_population(pop, evo, seed, g, config.jobs);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records.push_back(make_record(g, seed, pop, wall));

        const bool last = g + 1 >= config.generations;
        if (last || (config.checkpoint_every > 0 && (g + 1) % config.checkpoint_every == 0))
            save_checkpoint(config.checkpoint_path(seed), {config, seed, g, pop, records});
        if (!last) pop = next_generation(pop, evo, seed, g);
    }
    return records;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool resume) {
    config.validate();
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (!fs::is_directory(config.out_dir))
        throw std::runtime_error("cannot create output directory: " + config.out_dir);

    ExperimentResult result;
    for (const std::uint64_t seed : config.seeds) {
        std::vector<GenerationRecord> seed_records;
        const std::string ckpt_path = config.checkpoint_path(seed);
        if (resume && fs::exists(ckpt_path)) {
            const Checkpoint ckpt = load_checkpoint(ckpt_path);
            if (ckpt.seed != seed)
                throw std::runtime_error("checkpoint seed mismatch in " + ckpt_path);
            seed_records = run_seed(config, seed, &ckpt);
        } else {
            seed_records = run_seed(config, seed);
        }
        result.records.insert(result.records.end(), seed_records.begin(), seed_records.end());
    }

    result.metrics_path = config.metrics_path();
    result.timing_path = config.timing_path();
    write_metrics_csv(result.metrics_path, result.records);
    write_timing_csv(result.timing_path, result.records);
    return result;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != table.header.size())
                throw std::runtime_error("ragged CSV row in " + path);
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

void aggregate_csv(const std::string& metrics_path, const std::string& out_path) {
    const CsvTable table = read_csv(metrics_path);
    const std::size_t gen_col = table.column("generation");
    const std::size_t seed_col = table.column("seed");

    // generation -> rows, insertion-ordered by generation number
    std::map<int, std::vector<const std::vector<std::string>*>> by_generation;
    for (const auto& row : table.rows)
        by_generation[static_cast<int>(parse_double(row[gen_col]))].push_back(&row);

    std::size_t per_generation = 0;
    for (const auto& [gen, rows] : by_generation) {
        if (per_generation == 0) per_generation = rows.size();
        if (rows.size() != per_generation)
            throw std::runtime_error("seeds cover different generation counts");
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "generation,seeds";
    std::vector<std::size_t> value_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == gen_col || c == seed_col) continue;
        value_cols.push_back(c);
        out << ',' << table.header[c] << "_mean," << table.header[c] << "_std";
    }
    out << "\n";

    for (const auto& [gen, rows] : by_generation) {
        out << format_int(gen) << ',' << format_int(static_cast<long long>(rows.size()));
        for (const std::size_t c : value_cols) {
            double sum = 0.0;
            for (const auto* row : rows) sum += parse_double((*row)[c]);
            const double mean = sum / static_cast<double>(rows.size());
            double var = 0.0;
            for (const auto* row : rows) {
                const double d = parse_double((*row)[c]) - mean;
                var += d * d;
            }
            var /= static_cast<double>(rows.size());
            out << ',' << format_double(mean) << ',' << format_double(std::sqrt(var));
        }
        out << "\n";
    }
}

namespace {

std::string cell_text(int cell) {
    return "(" + format_int(cell / kGridSize) + "," + format_int(cell % kGridSize) + ")";
}

}  // namespace

EpisodeStats replay_best(const std::string& checkpoint_path, std::uint64_t seed, int steps,
                         std::ostream& trace) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    if (ckpt.population.empty()) throw std::runtime_error("checkpoint has an empty population");
    const std::size_t elite = elite_index(ckpt.population);
    const Genome& genome = ckpt.population[elite].genome;
    if (steps <= 0) steps = ckpt.config.steps;

    trace << "# qevo replay trace v1\n";
    trace << "# checkpoint=" << checkpoint_path << " generation=" << ckpt.generation
          << " concept=" << concept_name(concept_of(genome)) << " seed=" << seed
          << " steps=" << steps << "\n";
    trace << "# fields: step agent action reward0 reward1 a0 a1 coin color (state after the move)\n";

    static const char* kActionNames[] = {"north", "south", "west", "east"};
    const StepCallback on_step = [&trace](const StepTrace& s) {
        trace << "step=" << s.before.step << " agent=" << s.before.turn << " action="
              << (s.action < 0 ? "pass" : kActionNames[s.action]) << " reward0=" << s.rewards[0]
              << " reward1=" << s.rewards[1] << " a0=" << cell_text(s.after.agent_pos[0])
              << " a1=" << cell_text(s.after.agent_pos[1]) << " coin=" << cell_text(s.after.coin_pos)
              << " color=" << (s.after.coin_color == 0 ? "red" : "blue") << "\n";
    };

    const auto policy = make_policy(genome);
    const EpisodeStats stats =
        play_episode(*policy, steps, mix_seed({seed, kSeedReplay}), &on_step);
    const EpisodeMetrics m = episode_metrics(stats);
    trace << "# totals score=" << m.score << " coins=" << m.total_coins << " own=" << m.own_coins
          << " ocr=" << format_double(m.own_coin_rate) << "\n";
    return stats;
}

}  // namespace qevo
