#include "qemlab/circuit.hpp"

#include <string>

#include "qemlab/error.hpp"

namespace qem {

std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "x";
    case GateKind::SX: return "sx";
    case GateKind::Rz: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

void validate_circuit(const Circuit& c) {
  const auto bad = [](std::size_t i, const std::string& why) {
    throw ValidationError("op " + std::to_string(i) + ": " + why);
  };
  std::size_t first_measure = c.ops.size();
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    const GateOp& op = c.ops[i];
    if (op.q0 < 0 || op.q0 >= kNumQubits) bad(i, "qubit out of range");
    if (op.kind == GateKind::CX) {
      if (op.q1 < 0 || op.q1 >= kNumQubits) bad(i, "target qubit out of range");
      if (!coupled(op.q0, op.q1)) bad(i, "cx on uncoupled pair");
    } else if (op.q1 != -1) {
      bad(i, "stray second qubit on a one-qubit op");
    }
    if (op.kind == GateKind::Measure && first_measure == c.ops.size()) {
      first_measure = i;
    }
    if (op.kind != GateKind::Measure && first_measure != c.ops.size()) {
      bad(i, "gate after measurement");
    }
  }
  if (c.ops.size() - first_measure != kNumQubits) {
    throw ValidationError("circuit must end with one measurement per qubit");
  }
  bool seen[kNumQubits] = {};
  for (std::size_t i = first_measure; i < c.ops.size(); ++i) {
    if (seen[c.ops[i].q0]) bad(i, "qubit measured twice");
    seen[c.ops[i].q0] = true;
  }
}

PauliString parse_pauli(const std::string& s) {
  if (s.size() != kNumQubits) throw ValidationError("pauli string must have 5 letters");
  PauliString p{};
  for (int q = 0; q < kNumQubits; ++q) {
    switch (s[q]) {
      case 'I': p[q] = Pauli::I; break;
      case 'X': p[q] = Pauli::X; break;
      case 'Y': p[q] = Pauli::Y; break;
      case 'Z': p[q] = Pauli::Z; break;
      default: throw ValidationError("pauli letter must be one of IXYZ");
    }
  }
  return p;
}

std::string pauli_to_string(const PauliString& p) {
  std::string s(kNumQubits, 'I');
  for (int q = 0; q < kNumQubits; ++q) {
    s[q] = "IXYZ"[static_cast<int>(p[q])];
  }
  return s;
}

}  // namespace qem
