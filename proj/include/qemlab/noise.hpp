#pragma once

#include <map>
#include <string>

#include "qemlab/backend.hpp"
#include "qemlab/density.hpp"

namespace qem {

struct NoiseOptions {
  bool depolarizing = true;
  // Zero-temperature T1/T2 relaxation on the gate's qubits for the gate's
  // calibrated duration.
  bool relaxation = false;
  bool readout = true;
  // Replace per-gate local depolarizing with the whole-register channel of
  // the same rate. With 1q errors zeroed this makes a circuit's noise exactly
  // (1-lambda)^t_cx towards uniform, which the repolarizer inverts exactly.
  bool global_depolarizing = false;
};

struct GateChannel {
  double lambda = 0.0;
  double time_ns = 0.0;
};

struct NoiseModel {
  NoiseOptions opts;
  std::map<std::string, GateChannel> gates;           // canonical keys
  std::array<double, kNumQubits> t1_ns{};
  std::array<double, kNumQubits> t2_ns{};
  std::array<std::array<double, 4>, kNumQubits> confusion{};  // row-major M_q
};

// Validates the snapshot (throws naming any missing key) and converts it.
// Confusion matrix columns are indexed by the true bit and sum to 1.
NoiseModel build_noise_model(const BackendSnapshot& b, const NoiseOptions& opts);

ProbDist apply_confusion(const NoiseModel& nm, const ProbDist& p);

// Density-matrix evolution: per gate the unitary, then depolarizing with the
// gate's calibrated rate, then optional relaxation over the gate's duration.
// Terminal measurements contribute the readout confusion only.
DensityMatrix evolve_noisy(const Circuit& c, const NoiseModel& nm);
ProbDist noisy_distribution(const Circuit& c, const NoiseModel& nm);

}  // namespace qem
