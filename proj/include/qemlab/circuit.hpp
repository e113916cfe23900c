#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qemlab/prob_dist.hpp"

namespace qem {

// Native gate set of the 5-qubit linear-chain device, plus terminal measurement.
enum class GateKind { X, SX, Rz, CX, Measure };

struct GateOp {
  GateKind kind;
  int q0;             // target qubit; control qubit for CX
  int q1 = -1;        // CX target, unused otherwise
  double angle = 0.0; // Rz rotation angle in radians

  static GateOp x(int q) { return {GateKind::X, q}; }
  static GateOp sx(int q) { return {GateKind::SX, q}; }
  static GateOp rz(int q, double angle) { return {GateKind::Rz, q, -1, angle}; }
  static GateOp cx(int control, int target) { return {GateKind::CX, control, target}; }
  static GateOp measure(int q) { return {GateKind::Measure, q}; }

  bool is_two_qubit() const { return kind == GateKind::CX; }
};

struct CircuitMeta {
  std::string family;  // "pauli" or "random"
  int t = 0;           // gadget count / time-step count the circuit was drawn with
  std::uint64_t seed = 0;
};

struct Circuit {
  std::vector<GateOp> ops;
  CircuitMeta meta;
};

// Qubits i and j share a coupler iff they are neighbours on the 0-1-2-3-4 chain.
inline bool coupled(int i, int j) {
  int d = i - j;
  return (d == 1 || d == -1) && i >= 0 && j >= 0 && i < kNumQubits && j < kNumQubits;
}

// A full circuit ends with exactly one measurement per qubit and contains CX
// only on coupled pairs. Throws ValidationError with the offending op index.
void validate_circuit(const Circuit& c);

enum class Pauli : std::uint8_t { I, X, Y, Z };
using PauliString = std::array<Pauli, kNumQubits>;

PauliString parse_pauli(const std::string& s);  // e.g. "XIZYI", qubit 0 first
std::string pauli_to_string(const PauliString& p);

std::string gate_name(GateKind k);

}  // namespace qem
