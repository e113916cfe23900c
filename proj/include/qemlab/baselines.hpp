#pragma once

#include <vector>

#include "qemlab/dataset.hpp"

namespace qem {

// Inverts the tensor-product readout confusion of the snapshot, clamps
// negative entries to zero and renormalizes. A singular per-qubit confusion
// matrix (p(1|0) + p(0|1) = 1) raises ValidationError naming the qubit.
ProbDist spam_mitigate(const ProbDist& p, const BackendSnapshot& b);

// Inverts p = s * p_ideal + (1 - s) * U with s = (1-lambda)^t:
// entries strictly below the positivity threshold (1-s)/32 are dropped, the
// rest map through (p_i - (1-s)/32) / s, then renormalization. A fully
// zeroed vector falls back to uniform; s = 0 is an error.
ProbDist repolarize(const ProbDist& p, double lambda, int t);

// SPAM correction followed by the repolarizer.
ProbDist mix_mitigate(const ProbDist& p, const BackendSnapshot& b, double lambda, int t);

// Zeroes entries strictly below tau and renormalizes the rest. If nothing
// crosses the cut (tau = 0 included) or everything does, the input comes
// back unchanged.
ProbDist threshold_mitigate(const ProbDist& p, double tau);

// n equispaced points from lo to hi inclusive; defaults give the 30-point
// grid over [0, 0.5] with spacing 0.5/29.
std::vector<double> threshold_grid(int n = 30, double lo = 0.0, double hi = 0.5);

struct ThresholdSearch {
  double tau = 0.0;
  double median_l1rc = 0.0;
  std::vector<double> medians;  // one per grid point
  int excluded = 0;             // records with ||p_ideal - p_noisy||_1 = 0
};

// Chooses the grid point minimizing the median L1 relative change of the
// thresholded noisy distributions; ties break to the smaller tau.
ThresholdSearch optimize_threshold(const Dataset& d, const std::vector<double>& grid);

int count_2q_gates(const Circuit& c);

// Unweighted mean CX error over the distinct directed edges the circuit
// uses; 0 when it has no CX. A used edge absent from the calibration table
// raises ValidationError naming the edge.
double effective_e2q(const Circuit& c, const BackendSnapshot& b);
double effective_e2q(const EncodedCircuit& e, const BackendSnapshot& b);

enum class RepolarizerTMode { CxCount, LayerCount };

// The exponent t for the repolarizer: CX occurrences by default, or the
// scheduled layer count in layer-count mode.
int repolarizer_t(const EncodedCircuit& e, RepolarizerTMode mode);

}  // namespace qem
