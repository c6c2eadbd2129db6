#pragma once

#include <nlohmann/json_fwd.hpp>

#include "qevo/genome.hpp"

namespace qevo {

// Genome document, schema "qevo-genome/1".
//
// Circuit concepts serialize the full lowered gate sequence (kind, target,
// control for CNOT, angle for rotations) plus the fields needed to rebuild
// the genome exactly: num_qubits, num_layers (fixed), repetitions
// (prototype) and the 4 biases. The NN concept stores hidden sizes and the
// flat parameter vector; the random baseline stores only its concept tag.
nlohmann::json genome_to_json(const Genome& genome);

// Inverse of genome_to_json. Rebuilds the genome and verifies that
// re-lowering reproduces the stored gate records, so counts and lowering
// round-trip exactly.
Genome genome_from_json(const nlohmann::json& doc);

std::string genome_to_string(const Genome& genome);
Genome genome_from_string(const std::string& text);

}  // namespace qevo
