#pragma once

#include <array>
#include <utility>
#include <vector>

#include "qemlab/backend.hpp"
#include "qemlab/circuit.hpp"

namespace qem {

// One scheduling layer: a 5x5 matrix with one row per qubit and columns
// (X, SX, Rz, CX, Measure). Row forms:
//   idle        (0,0,0,0,0)
//   X           (1,0,0,0,0)
//   SX          (0,1,0,0,0)
//   Rz(alpha)   (0,0,((alpha/pi) mod 2)/2,0,0)
//   CX control  (0,0,0,-(1+target),0)
//   CX target   (0,0,0,+(1+control),0)
//   Measure     (0,0,0,0,1)
// Qubit indices inside CX entries are 0-based.
using EncodedLayer = std::array<std::array<double, kNumQubits>, kNumQubits>;

struct EncodedCircuit {
  std::vector<EncodedLayer> layers;  // real layers; padding is implicit
  int pad_depth = 0;                 // >= layers.size(); all-zero tail layers

  int depth() const { return static_cast<int>(layers.size()); }
};

// Greedy as-soon-as-possible scheduling: each op lands in the earliest layer
// where all of its qubits are free.
std::vector<std::vector<GateOp>> layer_circuit(const Circuit& c);

EncodedCircuit encode_circuit(const Circuit& c, int pad_depth);

// Inverse of encode_circuit up to layer-order op listing; kept for tests.
// Rz angles come back in [0, 2*pi).
Circuit decode_encoding(const EncodedCircuit& e);

// Throws ValidationError unless every row matches one of the forms above and
// CX control/target rows pair up.
void validate_encoding(const EncodedCircuit& e);

// [flattened layers (pad_depth * 25, row-major, zero padded); 101 backend
// scalars] — total pad_depth * 25 + 101 entries.
std::vector<double> flatten_inputs(const EncodedCircuit& e, const BackendSnapshot& b);

inline constexpr int kEmbedWidth = 132;  // 25 + 101 padded up with 6 zeros

struct LayerEmbedding {
  // pad_depth rows of 132 values: [25 layer entries; 101 backend slots with
  // only the slots touched by this layer filled; 6 trailing zeros].
  std::vector<std::array<double, kEmbedWidth>> rows;
  // 0 for real layers, -2 for padding layers.
  std::vector<double> mask;
};

LayerEmbedding embed_layers(const EncodedCircuit& e, const BackendSnapshot& b);

// CX occurrences readable straight off the encoding.
std::vector<std::pair<int, int>> cx_pairs(const EncodedCircuit& e);
int count_cx(const EncodedCircuit& e);

}  // namespace qem
