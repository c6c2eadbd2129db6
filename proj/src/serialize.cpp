#include "qevo/serialize.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace qevo {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "qevo-genome/1";

json gates_to_json(const std::vector<GateOp>& gates) {
    json arr = json::array();
    for (const GateOp& g : gates) {
        json rec{{"kind", gate_name(g.kind)}, {"target", g.target}};
        if (g.kind == GateKind::CNOT)
            rec["control"] = g.control;
        else
            rec["angle"] = g.angle;
        arr.push_back(std::move(rec));
    }
    return arr;
}

std::vector<GateOp> gates_from_json(const json& arr) {
    std::vector<GateOp> gates;
    gates.reserve(arr.size());
    for (const json& rec : arr) {
        GateOp g;
        g.kind = gate_kind_from_name(rec.at("kind").get<std::string>());
        g.target = rec.at("target").get<int>();
        if (g.kind == GateKind::CNOT)
            g.control = rec.at("control").get<int>();
        else
            g.angle = rec.at("angle").get<double>();
        gates.push_back(g);
    }
    return gates;
}

Biases biases_from_json(const json& arr) {
    if (arr.size() != kNumBiases) throw std::invalid_argument("genome document needs 4 biases");
    Biases b{};
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = arr.at(i).get<double>();
    return b;
}

// Rotation angles of a gate sequence, in order.
std::vector<double> rotation_angles(const std::vector<GateOp>& gates) {
    std::vector<double> angles;
    for (const GateOp& g : gates)
        if (g.is_rotation()) angles.push_back(g.angle);
    return angles;
}

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

json genome_to_json(const Genome& genome) {
    json doc{{"schema", kSchema}, {"concept", concept_name(concept_of(genome))}};
    struct Visitor {
        json& doc;
        void operator()(const FixedGenome& g) {
            doc["num_qubits"] = g.num_qubits;
            doc["num_layers"] = g.num_layers;
            doc["gates"] = gates_to_json(lower(g));
            doc["biases"] = g.biases;
        }
        void operator()(const LayerGenome& g) {
            doc["num_qubits"] = g.num_qubits;
            doc["gates"] = gates_to_json(lower(g));
            doc["biases"] = g.biases;
        }
        void operator()(const GateGenome& g) {
            doc["num_qubits"] = g.num_qubits;
            doc["gates"] = gates_to_json(g.gates);
            doc["biases"] = g.biases;
        }
        void operator()(const PrototypeGenome& g) {
            doc["num_qubits"] = g.num_qubits;
            doc["repetitions"] = g.repetitions;
            doc["gates"] = gates_to_json(lower(g));
            doc["biases"] = g.biases;
        }
        void operator()(const NNGenome& g) {
            doc["hidden"] = json::array({g.hidden1, g.hidden2});
            doc["params"] = g.params;
        }
        void operator()(const RandomGenome&) {}
    };
    Visitor v{doc};
    std::visit(v, genome);
    return doc;
}

Genome genome_from_json(const json& doc) {
    require(doc.value("schema", "") == kSchema, "unknown genome schema");
    const Concept kind = concept_from_name(doc.at("concept").get<std::string>());

    if (kind == Concept::Random) return RandomGenome{};
    if (kind == Concept::NN) {
        NNGenome g;
        const json& hidden = doc.at("hidden");
        require(hidden.size() == 2, "nn genome needs two hidden sizes");
        g.hidden1 = hidden.at(0).get<int>();
        g.hidden2 = hidden.at(1).get<int>();
        g.params = doc.at("params").get<std::vector<double>>();
        const Genome as_genome = g;
        require(static_cast<int>(g.params.size()) == param_count(as_genome),
                "nn genome has wrong parameter count");
        return g;
    }

    const int num_qubits = doc.at("num_qubits").get<int>();
    const std::vector<GateOp> gates = gates_from_json(doc.at("gates"));
    const Biases biases = biases_from_json(doc.at("biases"));
    Genome genome;

    switch (kind) {
        case Concept::Fixed: {
            FixedGenome g;
            g.num_qubits = num_qubits;
            g.num_layers = doc.at("num_layers").get<int>();
            g.thetas = rotation_angles(gates);
            g.biases = biases;
            genome = std::move(g);
            break;
        }
        case Concept::Layer: {
            LayerGenome g;
            g.num_qubits = num_qubits;
            const int per_layer = 4 * num_qubits;
            require(per_layer > 0 && gates.size() % static_cast<std::size_t>(per_layer) == 0,
                    "layer genome gate count does not divide into layers");
            const auto num_layers = gates.size() / static_cast<std::size_t>(per_layer);
            const std::vector<double> angles = rotation_angles(gates);
            const std::size_t angles_per_layer = static_cast<std::size_t>(3 * num_qubits);
            require(angles.size() == angles_per_layer * num_layers,
                    "layer genome has wrong rotation count");
            for (std::size_t l = 0; l < num_layers; ++l)
                g.layers.emplace_back(angles.begin() + static_cast<std::ptrdiff_t>(l * angles_per_layer),
                                      angles.begin() + static_cast<std::ptrdiff_t>((l + 1) * angles_per_layer));
            g.biases = biases;
            genome = std::move(g);
            break;
        }
        case Concept::Gate: {
            GateGenome g;
            g.num_qubits = num_qubits;
            g.gates = gates;
            g.biases = biases;
            genome = std::move(g);
            break;
        }
        case Concept::Prototype: {
            PrototypeGenome g;
            g.num_qubits = num_qubits;
            g.repetitions = doc.at("repetitions").get<int>();
            require(g.repetitions >= 1, "prototype genome needs >= 1 repetition");
            require(gates.size() % static_cast<std::size_t>(g.repetitions) == 0,
                    "prototype gate count does not divide into repetitions");
            const std::size_t proto_len = gates.size() / static_cast<std::size_t>(g.repetitions);
            for (std::size_t i = 0; i < proto_len; ++i) {
                const GateOp& op = gates[i];
                g.prototype.push_back({op.kind, op.target, op.control});
            }
            g.angles = rotation_angles(gates);
            g.biases = biases;
            genome = std::move(g);
            break;
        }
        default:
            throw std::logic_error("unhandled concept");
    }

    // The stored records must be exactly what the rebuilt genome lowers to;
    // this rejects documents whose structure does not match their concept.
    require(lower(genome) == gates, "gate records do not match the genome structure");
    return genome;
}

std::string genome_to_string(const Genome& genome) { return genome_to_json(genome).dump(); }

Genome genome_from_string(const std::string& text) {
    return genome_from_json(json::parse(text));
}

}  // namespace qevo
