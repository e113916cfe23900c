#pragma once

// Reference implementations used only by tests. Everything here recomputes
// results through a different route than the library: dense 32x32 matrix
// algebra and explicit Kraus sums instead of bit-twiddled in-place updates.

#include <Eigen/Dense>

#include "qemlab/circuit.hpp"
#include "qemlab/mlp.hpp"
#include "qemlab/noise.hpp"
#include "qemlab/prob_dist.hpp"

namespace qem::oracle {

using M32 = Eigen::Matrix<std::complex<double>, kDim, kDim>;
using V32 = Eigen::Matrix<std::complex<double>, kDim, 1>;

// Full-register embedding of a 2x2 matrix acting on qubit q (LSB order).
M32 embed_1q(const Eigen::Matrix2cd& u, int q);

// Dense unitary of the whole circuit (measurements skipped), built by
// multiplying embedded gate matrices defined from scratch here.
M32 circuit_unitary(const Circuit& c);

ProbDist ideal_probs(const Circuit& c);

// Tensor product of single-qubit Pauli matrices, qubit 0 least significant.
M32 pauli_matrix(const PauliString& p);

// exp(-i*alpha*P) = cos(alpha) I - i sin(alpha) P, exact since P^2 = I.
M32 gadget_unitary(const PauliString& p, double alpha);

// |tr(U^dag V)| / 32, the phase-insensitive overlap of two unitaries.
double unitary_fidelity(const M32& u, const M32& v);

// Density-matrix evolution as an explicit Kraus sum per channel, honoring the
// same NoiseOptions as the library, with readout applied as one dense 32x32
// stochastic matrix.
ProbDist noisy_probs_kraus(const Circuit& c, const NoiseModel& nm);

// KL in extended precision with compensated summation; same zero conventions
// as the library (p-entries <= 1e-12 contribute nothing, q clamped at 1e-12).
double kl_longdouble(const ProbDist& p, const ProbDist& q);

// All seven training losses plus the entropy bonus, recomputed termwise in
// long double from the printed formulas.
double loss_longdouble(const LossSpec& spec, const ProbDist& q, const ProbDist& p);

// Straight-line scalar re-implementation of the dense net forward pass
// (both heads, both batch-norm modes), sharing no code with the library.
std::vector<std::array<double, kDim>> mlp_forward_reference(
    const Mlp& m, const std::vector<std::vector<double>>& x_cb,
    const std::vector<std::array<double, kDim>>& p_noisy, bool train_mode);

}  // namespace qem::oracle
