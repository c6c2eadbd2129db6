#include "qevo/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qevo {

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::CNOT: return "cnot";
    }
    throw std::logic_error("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
    if (name == "rx") return GateKind::RX;
    if (name == "ry") return GateKind::RY;
    if (name == "rz") return GateKind::RZ;
    if (name == "cnot") return GateKind::CNOT;
    throw std::invalid_argument("unknown gate kind: " + name);
}

Statevector::Statevector(int num_qubits) : Statevector(num_qubits, 0) {}

Statevector::Statevector(int num_qubits, std::uint64_t basis_index) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 24)
        throw std::invalid_argument("num_qubits must be in [1, 24]");
    amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    if (basis_index >= amps_.size()) throw std::out_of_range("basis index out of range");
    amps_[basis_index] = Complex{1.0, 0.0};
}

void Statevector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_)
        throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for " +
                                std::to_string(num_qubits_) + " qubits");
}

double Statevector::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

void Statevector::apply(const GateOp& gate) {
    check_qubit(gate.target);
    const std::uint64_t dim = amps_.size();
    const std::uint64_t tbit = qubit_bit(gate.target);

    if (gate.kind == GateKind::CNOT) {
        check_qubit(gate.control);
        if (gate.control == gate.target)
            throw std::invalid_argument("CNOT control and target must differ");
        const std::uint64_t cbit = qubit_bit(gate.control);
        for (std::uint64_t k = 0; k < dim; ++k) {
            if ((k & cbit) && !(k & tbit)) std::swap(amps_[k], amps_[k | tbit]);
        }
        return;
    }

    const double half = 0.5 * gate.angle;
    const double c = std::cos(half);
    const double s = std::sin(half);

    switch (gate.kind) {
        case GateKind::RX: {
            // [[c, -i s], [-i s, c]]
            const Complex off{0.0, -s};
            for (std::uint64_t k = 0; k < dim; ++k) {
                if (k & tbit) continue;
                const Complex a0 = amps_[k];
                const Complex a1 = amps_[k | tbit];
                amps_[k] = c * a0 + off * a1;
                amps_[k | tbit] = off * a0 + c * a1;
            }
            break;
        }
        case GateKind::RY: {
            // [[c, -s], [s, c]]
            for (std::uint64_t k = 0; k < dim; ++k) {
                if (k & tbit) continue;
                const Complex a0 = amps_[k];
                const Complex a1 = amps_[k | tbit];
                amps_[k] = c * a0 - s * a1;
                amps_[k | tbit] = s * a0 + c * a1;
            }
            break;
        }
        case GateKind::RZ: {
            // diag(e^{-i half}, e^{+i half})
            const Complex p0{c, -s};
            const Complex p1{c, s};
            for (std::uint64_t k = 0; k < dim; ++k) amps_[k] *= (k & tbit) ? p1 : p0;
            break;
        }
        case GateKind::CNOT:
            break;  // handled above
    }
}

double Statevector::expectation_z(int qubit) const {
    check_qubit(qubit);
    const std::uint64_t tbit = qubit_bit(qubit);
    double value = 0.0;
    for (std::uint64_t k = 0; k < amps_.size(); ++k) {
        const double p = std::norm(amps_[k]);
        value += (k & tbit) ? -p : p;
    }
    return value;
}

Statevector apply_gate(Statevector state, const GateOp& gate) {
    state.apply(gate);
    return state;
}

Statevector amplitude_embed(std::span<const double> features, int num_qubits) {
    Statevector state(num_qubits);
    const std::size_t dim = state.dim();
    if (features.empty()) throw std::invalid_argument("feature vector is empty");
    if (features.size() > dim)
        throw std::invalid_argument("feature vector longer than 2^num_qubits");
    double norm_sq = 0.0;
    for (double f : features) norm_sq += f * f;
    if (norm_sq == 0.0) throw std::invalid_argument("feature vector has zero norm");
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    state[0] = 0.0;
    for (std::size_t k = 0; k < features.size(); ++k) state[k] = features[k] * inv_norm;
    return state;
}

double expectation_z(const Statevector& state, int qubit) { return state.expectation_z(qubit); }

std::vector<double> run_circuit(std::span<const GateOp> gates, Statevector input,
                                int measured_qubits) {
    if (measured_qubits < 0 || measured_qubits > input.num_qubits())
        throw std::invalid_argument("measured_qubits exceeds circuit width");
    for (const GateOp& g : gates) input.apply(g);
    std::vector<double> values(static_cast<std::size_t>(measured_qubits));
    for (int q = 0; q < measured_qubits; ++q) values[static_cast<std::size_t>(q)] = input.expectation_z(q);
    return values;
}

}  // namespace qevo
