#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "qevo/rng.hpp"
#include "qevo/statevector.hpp"

namespace qevo {

// Number of actions in the Coin Game; every circuit genome carries one bias
// per measured action value.
inline constexpr int kNumBiases = 4;
using Biases = std::array<double, kNumBiases>;

// Static circuit: per layer, a CNOT chain whose target offset cycles with
// the layer index, then an RZ/RY/RZ triple per qubit. Only the angles and
// biases evolve; the architecture is immutable.
struct FixedGenome {
    int num_qubits = 6;
    int num_layers = 1;
    std::vector<double> thetas;  // (layer, qubit, {alpha, beta, gamma}), row-major
    Biases biases{};
};

// Stack of strongly entangling layers (CNOT ring, then RX/RY/RZ per qubit).
// Mutation and recombination add, drop, and exchange whole layers; the
// genome always keeps at least one layer.
struct LayerGenome {
    int num_qubits = 6;
    std::vector<std::vector<double>> layers;  // each layer: 3 * num_qubits angles
    Biases biases{};
};

// Free-form gate list; edits happen per gate. Always at least one gate.
struct GateGenome {
    int num_qubits = 6;
    std::vector<GateOp> gates;
    Biases biases{};
};

// Gate placement without parameters; the building block of a prototype.
struct ProtoGate {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1;

    bool operator==(const ProtoGate&) const = default;
};

// A gate template (the prototype) instantiated `repetitions` times in a row.
// Rotation angles are per instance: angles holds repetitions * R values,
// instance-major, where R is the rotation count of the prototype.
struct PrototypeGenome {
    int num_qubits = 6;
    std::vector<ProtoGate> prototype;
    int repetitions = 1;
    std::vector<double> angles;
    Biases biases{};
};

// Classical baseline: 36 -> h1 -> h2 -> 4 feedforward net, tanh between
// layers. params holds W1, b1, W2, b2, W3, b3 flattened in that order,
// weights row-major by output unit.
struct NNGenome {
    int hidden1 = 64;
    int hidden2 = 64;
    std::vector<double> params;

    static constexpr int kInputs = 36;
    static constexpr int kOutputs = 4;
};

// Parameterless marker for the uniform-random baseline.
struct RandomGenome {
    bool operator==(const RandomGenome&) const = default;
};

using Genome =
    std::variant<FixedGenome, LayerGenome, GateGenome, PrototypeGenome, NNGenome, RandomGenome>;

enum class Concept { Fixed, Layer, Gate, Prototype, NN, Random };

Concept concept_of(const Genome& genome);
const char* concept_name(Concept c);
Concept concept_from_name(const std::string& name);

// Lowers a circuit genome to its gate sequence. Deterministic; throws for
// NN/Random genomes and for genomes violating their structural invariants.
std::vector<GateOp> lower(const Genome& genome);

struct GateCounts {
    int total = 0;
    int parameterized = 0;

    bool operator==(const GateCounts&) const = default;
};

// Total / parameterized gate counts of the lowered circuit (0/0 for NN and
// Random genomes).
GateCounts gate_count(const Genome& genome);

// Number of evolvable parameters: rotation angles + biases for circuits,
// weights + biases for the NN, 0 for Random.
int param_count(const Genome& genome);

// Canonical flat parameter vector: rotation angles in lowering order, then
// the 4 biases (NN: params as stored). set_flat_params is its inverse.
std::vector<double> flat_params(const Genome& genome);
void set_flat_params(Genome& genome, std::span<const double> values);

// Visits every parameter in canonical flat order.
template <typename F>
void for_each_param(Genome& genome, F&& f);

// Initialization settings; the meaning of `layers` and `gates` depends on
// the concept (see random_init).
struct GenomeConfig {
    Concept kind = Concept::Gate;
    int num_qubits = 6;
    int layers = 1;   // Fixed: layer count; Layer/Prototype: initial layers
    int gates = 70;   // Gate: initial gates; Prototype: gates per layer
    int hidden1 = 64;
    int hidden2 = 64;

    void validate() const;
};

// Draws a fresh genome. Angles are uniform in [-pi, pi); gate kinds are
// uniform over {RX, RY, RZ, CNOT} with a distinct random control for CNOT;
// circuit biases start at 0; NN parameters are uniform in [-1, 1].
Genome random_init(const GenomeConfig& config, Rng& rng);

// Uniformly random gate placement (no angle drawn).
ProtoGate random_gate_placement(int num_qubits, Rng& rng);

// Uniformly random gate, with the angle drawn for rotation kinds.
GateOp random_gate(int num_qubits, Rng& rng);

// Fresh strongly entangling layer angles, uniform in [-pi, pi).
std::vector<double> random_layer_angles(int num_qubits, Rng& rng);

inline constexpr double kPi = 3.14159265358979323846;

// --- template implementation ---

template <typename F>
void for_each_param(Genome& genome, F&& f) {
    struct Visitor {
        F& fn;
        void operator()(FixedGenome& g) {
            for (double& t : g.thetas) fn(t);
            for (double& b : g.biases) fn(b);
        }
        void operator()(LayerGenome& g) {
            for (auto& layer : g.layers)
                for (double& a : layer) fn(a);
            for (double& b : g.biases) fn(b);
        }
        void operator()(GateGenome& g) {
            for (GateOp& op : g.gates)
                if (op.is_rotation()) fn(op.angle);
            for (double& b : g.biases) fn(b);
        }
        void operator()(PrototypeGenome& g) {
            for (double& a : g.angles) fn(a);
            for (double& b : g.biases) fn(b);
        }
        void operator()(NNGenome& g) {
            for (double& w : g.params) fn(w);
        }
        void operator()(RandomGenome&) {}
    };
    Visitor v{f};
    std::visit(v, genome);
}

}  // namespace qevo
