#include "qemlab/density.hpp"

#include <cmath>

namespace qem {

DensityMatrix DensityMatrix::zero_state() {
  DensityMatrix d;
  d.rho(0, 0) = 1.0;
  return d;
}

void DensityMatrix::apply_1q(const Mat2& u, int q) {
  const int bit = 1 << q;
  // rho <- U rho
  for (int col = 0; col < kDim; ++col) {
    for (int i = 0; i < kDim; ++i) {
      if (i & bit) continue;
      const cplx a0 = rho(i, col);
      const cplx a1 = rho(i | bit, col);
      rho(i, col) = u[0] * a0 + u[1] * a1;
      rho(i | bit, col) = u[2] * a0 + u[3] * a1;
    }
  }
  // rho <- rho U^dagger
  for (int row = 0; row < kDim; ++row) {
    for (int j = 0; j < kDim; ++j) {
      if (j & bit) continue;
      const cplx b0 = rho(row, j);
      const cplx b1 = rho(row, j | bit);
      rho(row, j) = std::conj(u[0]) * b0 + std::conj(u[1]) * b1;
      rho(row, j | bit) = std::conj(u[2]) * b0 + std::conj(u[3]) * b1;
    }
  }
}

void DensityMatrix::apply_cx(int control, int target) {
  const int cbit = 1 << control;
  const int tbit = 1 << target;
  const auto flip = [&](int i) { return (i & cbit) ? (i ^ tbit) : i; };
  Mat32 out;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) out(flip(i), flip(j)) = rho(i, j);
  }
  rho = out;
}

void DensityMatrix::apply(const GateOp& op) {
  switch (op.kind) {
    case GateKind::CX: apply_cx(op.q0, op.q1); break;
    case GateKind::Measure: break;
    default: apply_1q(gate_matrix_1q(op.kind, op.angle), op.q0); break;
  }
}

void DensityMatrix::depolarize(const std::vector<int>& support, double lambda) {
  if (lambda == 0.0) return;
  int mask = 0;
  for (int q : support) mask |= 1 << q;
  const int k = static_cast<int>(support.size());
  const double fill = 1.0 / (1 << k);
  // Tr_S(rho): indexed by the off-support bits; accumulated over equal
  // on-support bits.
  Mat32 out = (1.0 - lambda) * rho;
  for (int rest_i = 0; rest_i < kDim; ++rest_i) {
    if (rest_i & mask) continue;
    for (int rest_j = 0; rest_j < kDim; ++rest_j) {
      if (rest_j & mask) continue;
      cplx tr = 0.0;
      for (int s = 0; s < kDim; ++s) {
        if (s & ~mask) continue;
        tr += rho(rest_i | s, rest_j | s);
      }
      const cplx add = lambda * fill * tr;
      for (int s = 0; s < kDim; ++s) {
        if (s & ~mask) continue;
        out(rest_i | s, rest_j | s) += add;
      }
    }
  }
  rho = out;
}

void DensityMatrix::depolarize_global(double lambda) {
  if (lambda == 0.0) return;
  const cplx tr = rho.trace();
  rho *= (1.0 - lambda);
  for (int i = 0; i < kDim; ++i) rho(i, i) += lambda * tr / static_cast<double>(kDim);
}

void DensityMatrix::relax(int q, double e1, double e2) {
  const int bit = 1 << q;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      const bool bi = i & bit;
      const bool bj = j & bit;
      if (bi && bj) {
        rho(i & ~bit, j & ~bit) += (1.0 - e1) * rho(i, j);
        rho(i, j) *= e1;
      } else if (bi != bj) {
        rho(i, j) *= e2;
      }
    }
  }
}

double DensityMatrix::trace_real() const { return rho.trace().real(); }

double DensityMatrix::hermiticity_defect() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

ProbDist DensityMatrix::diagonal() const {
  ProbDist p;
  for (int i = 0; i < kDim; ++i) p[i] = rho(i, i).real();
  return p;
}

}  // namespace qem
