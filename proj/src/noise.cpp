#include "qemlab/noise.hpp"

#include <cmath>

#include "qemlab/error.hpp"

namespace qem {

NoiseModel build_noise_model(const BackendSnapshot& b, const NoiseOptions& opts) {
  validate_snapshot(b);
  NoiseModel nm;
  nm.opts = opts;
  for (const auto& key : canonical_gate_keys()) {
    nm.gates[key] = {b.gate_error.at(key), b.gate_time_ns.at(key)};
  }
  for (int q = 0; q < kNumQubits; ++q) {
    nm.t1_ns[q] = b.t1_us[q] * 1e3;
    nm.t2_ns[q] = b.t2_us[q] * 1e3;
    const double p10 = b.readout[q][0];
    const double p01 = b.readout[q][1];
    nm.confusion[q] = {1.0 - p10, p01, p10, 1.0 - p01};
  }
  return nm;
}

ProbDist apply_confusion(const NoiseModel& nm, const ProbDist& p) {
  ProbDist cur = p;
  for (int q = 0; q < kNumQubits; ++q) {
    const auto& m = nm.confusion[q];
    const int bit = 1 << q;
    ProbDist next;
    for (int i = 0; i < kDim; ++i) {
      if (i & bit) continue;
      const double p0 = cur[i];
      const double p1 = cur[i | bit];
      next[i] = m[0] * p0 + m[1] * p1;
      next[i | bit] = m[2] * p0 + m[3] * p1;
    }
    cur = next;
  }
  return cur;
}

namespace {

std::string op_key(const GateOp& op) {
  if (op.kind == GateKind::CX) return cx_key(op.q0, op.q1);
  return gate_key(gate_name(op.kind), op.q0);
}

void relax_qubit(DensityMatrix& d, const NoiseModel& nm, int q, double time_ns) {
  if (time_ns <= 0.0) return;
  const double e1 = std::exp(-time_ns / nm.t1_ns[q]);
  // T2 > 2*T1 would make the channel non-CP; cap the coherence decay there.
  const double t2 = std::min(nm.t2_ns[q], 2.0 * nm.t1_ns[q]);
  const double e2 = std::exp(-time_ns / t2);
  d.relax(q, e1, e2);
}

}  // namespace

DensityMatrix evolve_noisy(const Circuit& c, const NoiseModel& nm) {
  DensityMatrix d = DensityMatrix::zero_state();
  for (const GateOp& op : c.ops) {
    if (op.kind == GateKind::Measure) continue;
    d.apply(op);
    const auto it = nm.gates.find(op_key(op));
    if (it == nm.gates.end()) {
      throw ValidationError("noise model has no entry for '" + op_key(op) + "'");
    }
    const GateChannel& ch = it->second;
    if (nm.opts.depolarizing && ch.lambda > 0.0) {
      if (nm.opts.global_depolarizing) {
        d.depolarize_global(ch.lambda);
      } else if (op.is_two_qubit()) {
        d.depolarize({op.q0, op.q1}, ch.lambda);
      } else {
        d.depolarize({op.q0}, ch.lambda);
      }
    }
    if (nm.opts.relaxation) {
      relax_qubit(d, nm, op.q0, ch.time_ns);
      if (op.is_two_qubit()) relax_qubit(d, nm, op.q1, ch.time_ns);
    }
  }
  return d;
}

ProbDist noisy_distribution(const Circuit& c, const NoiseModel& nm) {
  ProbDist p = evolve_noisy(c, nm).diagonal();
  // Scrub floating dust off the diagonal before treating it as probabilities.
  for (int i = 0; i < kDim; ++i) p[i] = std::max(p[i], 0.0);
  p.renormalize();
  if (nm.opts.readout) p = apply_confusion(nm, p);
  return p;
}

}  // namespace qem
