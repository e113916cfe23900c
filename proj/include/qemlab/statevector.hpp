#pragma once

#include <array>
#include <complex>

#include "qemlab/circuit.hpp"
#include "qemlab/prob_dist.hpp"

namespace qem {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// Native gate matrices. Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).
Mat2 gate_matrix_1q(GateKind kind, double angle);

// Pure state of the 5-qubit register, qubit 0 = least significant bit.
struct StateVector {
  std::array<cplx, kDim> amp{};

  static StateVector zero_state();  // |00000>

  void apply_1q(const Mat2& u, int q);
  void apply_cx(int control, int target);
  void apply(const GateOp& op);  // Measure ops are ignored

  double norm() const;
  ProbDist probabilities() const;
};

// Runs the circuit on |00000> and returns |amplitude|^2 per outcome.
ProbDist ideal_distribution(const Circuit& c);

}  // namespace qem
