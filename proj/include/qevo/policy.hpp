#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "qevo/coin_game.hpp"
#include "qevo/genome.hpp"

namespace qevo {

// Action-value head shared by all policies: pick the best legal action,
// lowest index on ties. Throws if the mask has no legal action.
int masked_argmax(std::span<const double> values, const ActionMask& mask);

// Maps 4 values linearly onto [0, 1]; a constant vector maps to all 0.5.
// Strictly increasing, so the masked argmax is unchanged.
std::array<double, kNumBiases> minmax_normalize(const std::array<double, kNumBiases>& values);

class Policy {
public:
    virtual ~Policy() = default;
    // rng is only consumed by stochastic policies.
    virtual int act(std::span<const double> observation, const ActionMask& mask, Rng& rng) = 0;
};

// Circuit policy: amplitude-embed the observation, run the lowered circuit,
// read <Z> on the first 4 qubits, add the biases, min-max normalize, mask,
// argmax. Deterministic.
class VqcPolicy : public Policy {
public:
    explicit VqcPolicy(const Genome& genome);
    int act(std::span<const double> observation, const ActionMask& mask, Rng& rng) override;

    // Pre-mask action values (expectations plus biases) for inspection.
    std::array<double, kNumBiases> action_values(std::span<const double> observation) const;

private:
    int num_qubits_;
    std::vector<GateOp> gates_;
    Biases biases_;
};

// Feedforward baseline: 36 -> h1 -> h2 -> 4, tanh between layers, linear
// output; illegal actions are excluded before the argmax.
class NnPolicy : public Policy {
public:
    explicit NnPolicy(const NNGenome& genome);
    int act(std::span<const double> observation, const ActionMask& mask, Rng& rng) override;

    std::array<double, NNGenome::kOutputs> action_values(
        std::span<const double> observation) const;

private:
    NNGenome genome_;
};

// Uniform over the legal actions.
class RandomPolicy : public Policy {
public:
    int act(std::span<const double> observation, const ActionMask& mask, Rng& rng) override;
};

std::unique_ptr<Policy> make_policy(const Genome& genome);

// One-shot conveniences mirroring the policy classes.
int vqc_action(const Genome& genome, std::span<const double> observation, const ActionMask& mask);
int nn_action(const NNGenome& genome, std::span<const double> observation, const ActionMask& mask);
int random_action(const ActionMask& mask, Rng& rng);

}  // namespace qevo
