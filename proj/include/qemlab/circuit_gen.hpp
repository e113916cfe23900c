#pragma once

#include <vector>

#include "qemlab/circuit.hpp"
#include "qemlab/rng.hpp"

namespace qem {

// CX between arbitrary qubits, expanded to coupler CXs by the recursive
// 4-gate cascade CX(a,c) = CX(a,b) CX(b,c) CX(a,b) CX(b,c) with b the
// neighbour of a towards c. No SWAP insertion, no optimization.
std::vector<GateOp> route_cx(int control, int target);

// Native-gate synthesis of exp(-i*alpha*P) up to global phase:
// basis changes onto Z (H as Rz(pi/2) SX Rz(pi/2), Y via an extra Rz(-pi/2)
// and its inverse), a CX parity ladder over the active qubits, Rz(2*alpha)
// on the last active qubit, then everything undone in reverse.
// The identity string gives an empty op list.
std::vector<GateOp> compile_gadget(const PauliString& p, double alpha);

// T gadgets exp(-i*alpha*P) with P uniform over {I,X,Y,Z}^5 (qubit 0 drawn
// first) and alpha uniform over [0, 2*pi), then one measurement per qubit.
Circuit gen_pauli_circuit(int t_gadgets, std::uint64_t seed);

// T single draws: qubit i, then gate from {Rz, X, SX, CX} (that order), then
// the CX partner from the remaining qubits or the Rz angle. Non-neighbour
// CXs are routed. Ends with one measurement per qubit.
Circuit gen_random_circuit(int t_steps, std::uint64_t seed);

}  // namespace qem
