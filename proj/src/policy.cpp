#include "qevo/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "qevo/statevector.hpp"

namespace qevo {

int masked_argmax(std::span<const double> values, const ActionMask& mask) {
    int best = -1;
    for (std::size_t a = 0; a < mask.size(); ++a) {
        if (!mask[a]) continue;
        if (best < 0 || values[a] > values[static_cast<std::size_t>(best)])
            best = static_cast<int>(a);
    }
    if (best < 0) throw std::invalid_argument("no legal action in mask");
    return best;
}

std::array<double, kNumBiases> minmax_normalize(const std::array<double, kNumBiases>& values) {
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::array<double, kNumBiases> out{};
    if (hi == lo) {
        out.fill(0.5);
        return out;
    }
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) * inv;
    return out;
}

VqcPolicy::VqcPolicy(const Genome& genome)
    : num_qubits_(0), gates_(lower(genome)) {
    struct Visitor {
        int num_qubits = 0;
        Biases biases{};
        void operator()(const FixedGenome& g) { num_qubits = g.num_qubits; biases = g.biases; }
        void operator()(const LayerGenome& g) { num_qubits = g.num_qubits; biases = g.biases; }
        void operator()(const GateGenome& g) { num_qubits = g.num_qubits; biases = g.biases; }
        void operator()(const PrototypeGenome& g) { num_qubits = g.num_qubits; biases = g.biases; }
        void operator()(const NNGenome&) { throw std::invalid_argument("not a circuit genome"); }
        void operator()(const RandomGenome&) { throw std::invalid_argument("not a circuit genome"); }
    };
    Visitor v;
    std::visit(v, genome);
    num_qubits_ = v.num_qubits;
    biases_ = v.biases;
    if (num_qubits_ < kNumActions)
        throw std::invalid_argument("circuit policy needs at least 4 qubits");
}

std::array<double, kNumBiases> VqcPolicy::action_values(
    std::span<const double> observation) const {
    if (observation.size() > (std::size_t{1} << num_qubits_))
        throw std::invalid_argument("observation does not fit the circuit register");
    Statevector state = amplitude_embed(observation, num_qubits_);
    for (const GateOp& g : gates_) state.apply(g);
    std::array<double, kNumBiases> values{};
    for (int q = 0; q < kNumActions; ++q)
        values[static_cast<std::size_t>(q)] = state.expectation_z(q) + biases_[static_cast<std::size_t>(q)];
    return values;
}

int VqcPolicy::act(std::span<const double> observation, const ActionMask& mask, Rng&) {
    const auto normalized = minmax_normalize(action_values(observation));
    return masked_argmax(normalized, mask);
}

NnPolicy::NnPolicy(const NNGenome& genome) : genome_(genome) {
    const Genome g = genome;
    if (static_cast<int>(genome_.params.size()) != param_count(g))
        throw std::invalid_argument("NN genome has wrong parameter count");
}

std::array<double, NNGenome::kOutputs> NnPolicy::action_values(
    std::span<const double> observation) const {
    if (observation.size() != static_cast<std::size_t>(NNGenome::kInputs))
        throw std::invalid_argument("NN expects a 36-feature observation");
    const int h1 = genome_.hidden1, h2 = genome_.hidden2;
    const double* p = genome_.params.data();

    auto affine = [&p](std::span<const double> in, std::span<double> out) {
        for (double& o : out) {
            double acc = 0.0;
            for (double x : in) acc += *p++ * x;
            o = acc;
        }
        for (double& o : out) o += *p++;
    };

    std::vector<double> a1(static_cast<std::size_t>(h1));
    affine(observation, a1);
    for (double& v : a1) v = std::tanh(v);

    std::vector<double> a2(static_cast<std::size_t>(h2));
    affine(a1, a2);
    for (double& v : a2) v = std::tanh(v);

    std::array<double, NNGenome::kOutputs> q{};
    affine(a2, q);
    return q;
}

int NnPolicy::act(std::span<const double> observation, const ActionMask& mask, Rng&) {
    return masked_argmax(action_values(observation), mask);
}

int RandomPolicy::act(std::span<const double>, const ActionMask& mask, Rng& rng) {
    return random_action(mask, rng);
}

std::unique_ptr<Policy> make_policy(const Genome& genome) {
    if (const auto* nn = std::get_if<NNGenome>(&genome)) return std::make_unique<NnPolicy>(*nn);
    if (std::holds_alternative<RandomGenome>(genome)) return std::make_unique<RandomPolicy>();
    return std::make_unique<VqcPolicy>(genome);
}

int vqc_action(const Genome& genome, std::span<const double> observation, const ActionMask& mask) {
    VqcPolicy policy(genome);
    Rng unused(0);
    return policy.act(observation, mask, unused);
}

int nn_action(const NNGenome& genome, std::span<const double> observation, const ActionMask& mask) {
    NnPolicy policy(genome);
    Rng unused(0);
    return policy.act(observation, mask, unused);
}

int random_action(const ActionMask& mask, Rng& rng) {
    int legal = 0;
    for (bool m : mask) legal += m ? 1 : 0;
    if (legal == 0) throw std::invalid_argument("no legal action in mask");
    int k = rng.uniform_int(legal);
    for (std::size_t a = 0; a < mask.size(); ++a) {
        if (!mask[a]) continue;
        if (k-- == 0) return static_cast<int>(a);
    }
    throw std::logic_error("unreachable");
}

}  // namespace qevo
