#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qevo {

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT };

inline bool is_rotation(GateKind k) { return k != GateKind::CNOT; }

const char* gate_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

// One circuit operation. Rotations use `target` and `angle`; CNOT uses
// `control` and `target` (control fires the target flip).
struct GateOp {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1;
    double angle = 0.0;

    static GateOp rx(int target, double angle) { return {GateKind::RX, target, -1, angle}; }
    static GateOp ry(int target, double angle) { return {GateKind::RY, target, -1, angle}; }
    static GateOp rz(int target, double angle) { return {GateKind::RZ, target, -1, angle}; }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }

    bool is_rotation() const { return qevo::is_rotation(kind); }
    bool operator==(const GateOp&) const = default;
};

// Dense n-qubit state, 2^n complex amplitudes.
//
// Convention: qubit 0 is the most significant bit of the basis-state index,
// i.e. |q0 q1 ... q_{n-1}> maps to index (q0 << (n-1)) | ... | q_{n-1}.
// Rotations follow R(theta) = exp(-i * theta * G / 2) for G in {X, Y, Z}.
class Statevector {
public:
    using Complex = std::complex<double>;

    // |0...0> on num_qubits qubits.
    explicit Statevector(int num_qubits);

    // Basis state |index>.
    Statevector(int num_qubits, std::uint64_t basis_index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    Complex& operator[](std::size_t i) { return amps_[i]; }
    std::span<const Complex> amplitudes() const { return amps_; }

    double norm_sq() const;

    // Applies one gate in place.
    void apply(const GateOp& gate);

    // <Z> on one qubit: P(bit = 0) - P(bit = 1), in [-1, 1].
    double expectation_z(int qubit) const;

private:
    std::uint64_t qubit_bit(int qubit) const {
        return std::uint64_t{1} << (num_qubits_ - 1 - qubit);
    }
    void check_qubit(int qubit) const;

    int num_qubits_;
    std::vector<Complex> amps_;
};

// Value-semantics wrapper around Statevector::apply.
Statevector apply_gate(Statevector state, const GateOp& gate);

// Encodes a feature vector into state amplitudes: zero-pad to 2^n entries,
// divide by the Euclidean norm, write as amplitudes. Requires
// 0 < features.size() <= 2^n and a nonzero norm.
Statevector amplitude_embed(std::span<const double> features, int num_qubits);

double expectation_z(const Statevector& state, int qubit);

// Applies all gates in order, then returns <Z> for qubits 0..measured_qubits-1.
std::vector<double> run_circuit(std::span<const GateOp> gates, Statevector input,
                                int measured_qubits);

}  // namespace qevo
