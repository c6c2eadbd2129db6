#include "qevo/genome.hpp"

#include <span>
#include <stdexcept>

namespace qevo {

namespace {

void check_qubits(int num_qubits) {
    if (num_qubits < 2) throw std::invalid_argument("circuit genomes need at least 2 qubits");
}

int rotation_count(const std::vector<ProtoGate>& prototype) {
    int r = 0;
    for (const ProtoGate& g : prototype)
        if (is_rotation(g.kind)) ++r;
    return r;
}

}  // namespace

Concept concept_of(const Genome& genome) {
    struct Visitor {
        Concept operator()(const FixedGenome&) const { return Concept::Fixed; }
        Concept operator()(const LayerGenome&) const { return Concept::Layer; }
        Concept operator()(const GateGenome&) const { return Concept::Gate; }
        Concept operator()(const PrototypeGenome&) const { return Concept::Prototype; }
        Concept operator()(const NNGenome&) const { return Concept::NN; }
        Concept operator()(const RandomGenome&) const { return Concept::Random; }
    };
    return std::visit(Visitor{}, genome);
}

const char* concept_name(Concept c) {
    switch (c) {
        case Concept::Fixed: return "fixed";
        case Concept::Layer: return "layer";
        case Concept::Gate: return "gate";
        case Concept::Prototype: return "prototype";
        case Concept::NN: return "nn";
        case Concept::Random: return "random";
    }
    throw std::logic_error("unknown concept");
}

Concept concept_from_name(const std::string& name) {
    if (name == "fixed") return Concept::Fixed;
    if (name == "layer") return Concept::Layer;
    if (name == "gate") return Concept::Gate;
    if (name == "prototype") return Concept::Prototype;
    if (name == "nn") return Concept::NN;
    if (name == "random") return Concept::Random;
    throw std::invalid_argument("unknown concept: " + name);
}

std::vector<GateOp> lower(const Genome& genome) {
    struct Visitor {
        std::vector<GateOp> operator()(const FixedGenome& g) const {
            check_qubits(g.num_qubits);
            const int n = g.num_qubits;
            if (g.num_layers < 1) throw std::invalid_argument("fixed genome needs >= 1 layer");
            if (static_cast<int>(g.thetas.size()) != 3 * n * g.num_layers)
                throw std::invalid_argument("fixed genome has wrong theta count");
            std::vector<GateOp> ops;
            ops.reserve(static_cast<std::size_t>(g.num_layers) * 4 * n);
            std::size_t t = 0;
            for (int layer = 1; layer <= g.num_layers; ++layer) {
                // Offset cycles through 1..n-1 so the CNOT target never
                // collides with its control.
                const int offset = (layer - 1) % (n - 1) + 1;
                for (int q = 0; q < n; ++q) ops.push_back(GateOp::cnot(q, (q + offset) % n));
                for (int q = 0; q < n; ++q) {
                    ops.push_back(GateOp::rz(q, g.thetas[t++]));
                    ops.push_back(GateOp::ry(q, g.thetas[t++]));
                    ops.push_back(GateOp::rz(q, g.thetas[t++]));
                }
            }
            return ops;
        }

        std::vector<GateOp> operator()(const LayerGenome& g) const {
            check_qubits(g.num_qubits);
            const int n = g.num_qubits;
            if (g.layers.empty()) throw std::invalid_argument("layer genome is empty");
            std::vector<GateOp> ops;
            ops.reserve(g.layers.size() * 4 * static_cast<std::size_t>(n));
            for (const auto& layer : g.layers) {
                if (static_cast<int>(layer.size()) != 3 * n)
                    throw std::invalid_argument("layer has wrong angle count");
                for (int q = 0; q < n; ++q) ops.push_back(GateOp::cnot(q, (q + n - 1) % n));
                for (int q = 0; q < n; ++q) {
                    ops.push_back(GateOp::rx(q, layer[static_cast<std::size_t>(3 * q)]));
                    ops.push_back(GateOp::ry(q, layer[static_cast<std::size_t>(3 * q + 1)]));
                    ops.push_back(GateOp::rz(q, layer[static_cast<std::size_t>(3 * q + 2)]));
                }
            }
            return ops;
        }

        std::vector<GateOp> operator()(const GateGenome& g) const {
            check_qubits(g.num_qubits);
            if (g.gates.empty()) throw std::invalid_argument("gate genome is empty");
            return g.gates;
        }

        std::vector<GateOp> operator()(const PrototypeGenome& g) const {
            check_qubits(g.num_qubits);
            if (g.prototype.empty()) throw std::invalid_argument("prototype is empty");
            if (g.repetitions < 1)
                throw std::invalid_argument("prototype genome needs >= 1 repetition");
            const int rot = rotation_count(g.prototype);
            if (static_cast<int>(g.angles.size()) != rot * g.repetitions)
                throw std::invalid_argument("prototype genome has wrong angle count");
            std::vector<GateOp> ops;
            ops.reserve(g.prototype.size() * static_cast<std::size_t>(g.repetitions));
            std::size_t a = 0;
            for (int rep = 0; rep < g.repetitions; ++rep) {
                for (const ProtoGate& p : g.prototype) {
                    if (is_rotation(p.kind))
                        ops.push_back({p.kind, p.target, -1, g.angles[a++]});
                    else
                        ops.push_back(GateOp::cnot(p.control, p.target));
                }
            }
            return ops;
        }

        std::vector<GateOp> operator()(const NNGenome&) const {
            throw std::invalid_argument("NN genome has no circuit form");
        }
        std::vector<GateOp> operator()(const RandomGenome&) const {
            throw std::invalid_argument("random genome has no circuit form");
        }
    };
    return std::visit(Visitor{}, genome);
}

GateCounts gate_count(const Genome& genome) {
    struct Visitor {
        GateCounts operator()(const FixedGenome& g) const {
            return {4 * g.num_qubits * g.num_layers, 3 * g.num_qubits * g.num_layers};
        }
        GateCounts operator()(const LayerGenome& g) const {
            const int layers = static_cast<int>(g.layers.size());
            return {4 * g.num_qubits * layers, 3 * g.num_qubits * layers};
        }
        GateCounts operator()(const GateGenome& g) const {
            GateCounts c{static_cast<int>(g.gates.size()), 0};
            for (const GateOp& op : g.gates)
                if (op.is_rotation()) ++c.parameterized;
            return c;
        }
        GateCounts operator()(const PrototypeGenome& g) const {
            return {g.repetitions * static_cast<int>(g.prototype.size()),
                    g.repetitions * rotation_count(g.prototype)};
        }
        GateCounts operator()(const NNGenome&) const { return {0, 0}; }
        GateCounts operator()(const RandomGenome&) const { return {0, 0}; }
    };
    return std::visit(Visitor{}, genome);
}

int param_count(const Genome& genome) {
    if (const auto* nn = std::get_if<NNGenome>(&genome)) {
        const int i = NNGenome::kInputs, o = NNGenome::kOutputs;
        return i * nn->hidden1 + nn->hidden1 + nn->hidden1 * nn->hidden2 + nn->hidden2 +
               nn->hidden2 * o + o;
    }
    if (std::holds_alternative<RandomGenome>(genome)) return 0;
    return gate_count(genome).parameterized + kNumBiases;
}

std::vector<double> flat_params(const Genome& genome) {
    struct Visitor {
        std::vector<double> out;
        void take(const double& v) { out.push_back(v); }
        void operator()(const FixedGenome& g) {
            for (double t : g.thetas) take(t);
            for (double b : g.biases) take(b);
        }
        void operator()(const LayerGenome& g) {
            for (const auto& layer : g.layers)
                for (double a : layer) take(a);
            for (double b : g.biases) take(b);
        }
        void operator()(const GateGenome& g) {
            for (const GateOp& op : g.gates)
                if (op.is_rotation()) take(op.angle);
            for (double b : g.biases) take(b);
        }
        void operator()(const PrototypeGenome& g) {
            for (double a : g.angles) take(a);
            for (double b : g.biases) take(b);
        }
        void operator()(const NNGenome& g) { out = g.params; }
        void operator()(const RandomGenome&) {}
    };
    Visitor v;
    v.out.reserve(static_cast<std::size_t>(param_count(genome)));
    std::visit(v, genome);
    return std::move(v.out);
}

void set_flat_params(Genome& genome, std::span<const double> values) {
    if (static_cast<int>(values.size()) != param_count(genome))
        throw std::invalid_argument("parameter vector has wrong length");
    std::size_t i = 0;
    for_each_param(genome, [&](double& v) { v = values[i++]; });
}

void GenomeConfig::validate() const {
    check_qubits(num_qubits);
    switch (kind) {
        case Concept::Fixed:
            if (layers < 1) throw std::invalid_argument("fixed concept needs layers >= 1");
            break;
        case Concept::Layer:
            if (layers < 1) throw std::invalid_argument("layer concept needs initial layers >= 1");
            break;
        case Concept::Gate:
            if (gates < 1) throw std::invalid_argument("gate concept needs initial gates >= 1");
            break;
        case Concept::Prototype:
            if (layers < 1 || gates < 1)
                throw std::invalid_argument("prototype concept needs layers >= 1 and gates >= 1");
            break;
        case Concept::NN:
            if (hidden1 < 1 || hidden2 < 1)
                throw std::invalid_argument("hidden layer sizes must be >= 1");
            break;
        case Concept::Random:
            break;
    }
}

ProtoGate random_gate_placement(int num_qubits, Rng& rng) {
    ProtoGate g;
    switch (rng.uniform_int(4)) {
        case 0: g.kind = GateKind::RX; break;
        case 1: g.kind = GateKind::RY; break;
        case 2: g.kind = GateKind::RZ; break;
        default: g.kind = GateKind::CNOT; break;
    }
    g.target = rng.uniform_int(num_qubits);
    if (g.kind == GateKind::CNOT) {
        int c = rng.uniform_int(num_qubits - 1);
        if (c >= g.target) ++c;  // distinct control
        g.control = c;
    }
    return g;
}

GateOp random_gate(int num_qubits, Rng& rng) {
    const ProtoGate p = random_gate_placement(num_qubits, rng);
    if (is_rotation(p.kind)) return {p.kind, p.target, -1, rng.uniform(-kPi, kPi)};
    return GateOp::cnot(p.control, p.target);
}

std::vector<double> random_layer_angles(int num_qubits, Rng& rng) {
    std::vector<double> angles(static_cast<std::size_t>(3 * num_qubits));
    for (double& a : angles) a = rng.uniform(-kPi, kPi);
    return angles;
}

Genome random_init(const GenomeConfig& config, Rng& rng) {
    config.validate();
    const int n = config.num_qubits;
    switch (config.kind) {
        case Concept::Fixed: {
            FixedGenome g;
            g.num_qubits = n;
            g.num_layers = config.layers;
            g.thetas.resize(static_cast<std::size_t>(3 * n * config.layers));
            for (double& t : g.thetas) t = rng.uniform(-kPi, kPi);
            return g;
        }
        case Concept::Layer: {
            LayerGenome g;
            g.num_qubits = n;
            g.layers.reserve(static_cast<std::size_t>(config.layers));
            for (int l = 0; l < config.layers; ++l) g.layers.push_back(random_layer_angles(n, rng));
            return g;
        }
        case Concept::Gate: {
            GateGenome g;
            g.num_qubits = n;
            g.gates.reserve(static_cast<std::size_t>(config.gates));
            for (int i = 0; i < config.gates; ++i) g.gates.push_back(random_gate(n, rng));
            return g;
        }
        case Concept::Prototype: {
            PrototypeGenome g;
            g.num_qubits = n;
            g.repetitions = config.layers;
            g.prototype.reserve(static_cast<std::size_t>(config.gates));
            for (int i = 0; i < config.gates; ++i)
                g.prototype.push_back(random_gate_placement(n, rng));
            const int rot = rotation_count(g.prototype);
            g.angles.resize(static_cast<std::size_t>(rot * g.repetitions));
            for (double& a : g.angles) a = rng.uniform(-kPi, kPi);
            return g;
        }
        case Concept::NN: {
            NNGenome g;
            g.hidden1 = config.hidden1;
            g.hidden2 = config.hidden2;
            Genome tmp = g;
            g.params.resize(static_cast<std::size_t>(param_count(tmp)));
            for (double& w : g.params) w = rng.uniform(-1.0, 1.0);
            return g;
        }
        case Concept::Random:
            return RandomGenome{};
    }
    throw std::logic_error("unknown concept");
}

}  // namespace qevo
