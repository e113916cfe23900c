#include "qemlab/statevector.hpp"

#include <cmath>

#include "qemlab/error.hpp"

namespace qem {

Mat2 gate_matrix_1q(GateKind kind, double angle) {
  switch (kind) {
    case GateKind::X:
      return {cplx(0), cplx(1), cplx(1), cplx(0)};
    case GateKind::SX:
      return {cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5)};
    case GateKind::Rz:
      return {std::polar(1.0, -angle / 2), cplx(0), cplx(0), std::polar(1.0, angle / 2)};
    default:
      throw ValidationError("no 1q matrix for this gate kind");
  }
}

StateVector StateVector::zero_state() {
  StateVector s;
  s.amp[0] = 1.0;
  return s;
}

void StateVector::apply_1q(const Mat2& u, int q) {
  const int bit = 1 << q;
  for (int i = 0; i < kDim; ++i) {
    if (i & bit) continue;
    const cplx a0 = amp[i];
    const cplx a1 = amp[i | bit];
    amp[i] = u[0] * a0 + u[1] * a1;
    amp[i | bit] = u[2] * a0 + u[3] * a1;
  }
}

void StateVector::apply_cx(int control, int target) {
  const int cbit = 1 << control;
  const int tbit = 1 << target;
  for (int i = 0; i < kDim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
  }
}

void StateVector::apply(const GateOp& op) {
  switch (op.kind) {
    case GateKind::CX: apply_cx(op.q0, op.q1); break;
    case GateKind::Measure: break;
    default: apply_1q(gate_matrix_1q(op.kind, op.angle), op.q0); break;
  }
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

ProbDist StateVector::probabilities() const {
  ProbDist p;
  for (int i = 0; i < kDim; ++i) p[i] = std::norm(amp[i]);
  return p;
}

ProbDist ideal_distribution(const Circuit& c) {
  StateVector s = StateVector::zero_state();
  for (const GateOp& op : c.ops) s.apply(op);
  return s.probabilities();
}

}  // namespace qem
