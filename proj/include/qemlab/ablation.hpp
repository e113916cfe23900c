#pragma once

#include "qemlab/dataset.hpp"
#include "qemlab/rng.hpp"

namespace qem {

// Which model-input field gets permuted across records. The permutation
// preserves each field's marginal distribution while destroying its pairing
// with the record's targets; Standard is the identity.
enum class AblationMode { Standard, RandomBackend, RandomNoisy, RandomCircuit, RandomCircuitBackend };

const char* ablation_name(AblationMode mode);
AblationMode parse_ablation(const std::string& name);

// Returns a copy with the selected input field(s) permuted; targets (p_ideal)
// and metadata stay on their original records, so evaluation pairs ablated
// model inputs with the original record's metrics. RandomCircuitBackend
// moves circuit and backend together under a single permutation.
Dataset randomize_inputs(const Dataset& d, AblationMode mode, Rng& rng);

}  // namespace qem
