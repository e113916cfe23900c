#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qemlab/statevector.hpp"

namespace qem {

using Mat32 = Eigen::Matrix<cplx, kDim, kDim>;

// Mixed state of the register. Invariants: trace 1 (within 1e-10), Hermitian,
// eigenvalues >= -1e-10 (floating dust only).
struct DensityMatrix {
  Mat32 rho = Mat32::Zero();

  static DensityMatrix zero_state();

  void apply_1q(const Mat2& u, int q);
  void apply_cx(int control, int target);
  void apply(const GateOp& op);  // Measure ops are ignored

  // (1-lambda) rho + lambda Tr_S(rho) (x) I/2^|S| on the support qubits.
  void depolarize(const std::vector<int>& support, double lambda);
  // (1-lambda) rho + lambda I/32, the whole-register channel.
  void depolarize_global(double lambda);
  // Zero-temperature relaxation: populations decay by e1 = exp(-t/T1),
  // coherences by e2 = exp(-t/T2). CPTP requires e2 <= sqrt(e1).
  void relax(int q, double e1, double e2);

  double trace_real() const;
  double hermiticity_defect() const;
  ProbDist diagonal() const;
};

}  // namespace qem
