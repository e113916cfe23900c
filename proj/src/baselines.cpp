#include "qemlab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qemlab/error.hpp"
#include "qemlab/metrics.hpp"

namespace qem {

ProbDist spam_mitigate(const ProbDist& p, const BackendSnapshot& b) {
  ProbDist out = p;
  for (int q = 0; q < kNumQubits; ++q) {
    const double p10 = b.readout[q][0], p01 = b.readout[q][1];
    const double det = 1.0 - p10 - p01;
    if (det == 0.0)
      throw ValidationError("spam_mitigate: confusion matrix of qubit " + std::to_string(q) +
                            " is singular");
    // Columns of the inverse confusion matrix, indexed by measured bit.
    const double inv00 = (1.0 - p01) / det, inv01 = -p01 / det;
    const double inv10 = -p10 / det, inv11 = (1.0 - p10) / det;
    const int bit = 1 << q;
    for (int i = 0; i < kDim; ++i) {
      if (i & bit) continue;
      const double v0 = out.p[i], v1 = out.p[i | bit];
      out.p[i] = inv00 * v0 + inv01 * v1;
      out.p[i | bit] = inv10 * v0 + inv11 * v1;
    }
  }
  for (double& v : out.p) v = std::max(v, 0.0);
  out.renormalize();
  return out;
}

ProbDist repolarize(const ProbDist& p, double lambda, int t) {
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("repolarize: lambda outside [0, 1]");
  if (t < 0) throw ValidationError("repolarize: negative gate count");
  const double s = std::pow(1.0 - lambda, t);
  if (s == 0.0) throw ValidationError("repolarize: channel is fully depolarizing, not invertible");
  if (s == 1.0) return p;
  const double theta = (1.0 - s) / kDim;

  ProbDist out;
  double total = 0.0;
  for (int i = 0; i < kDim; ++i) {
    out.p[i] = p.p[i] < theta ? 0.0 : (p.p[i] - theta) / s;
    total += out.p[i];
  }
  if (total == 0.0) return ProbDist::uniform();
  for (double& v : out.p) v /= total;
  return out;
}

ProbDist mix_mitigate(const ProbDist& p, const BackendSnapshot& b, double lambda, int t) {
  return repolarize(spam_mitigate(p, b), lambda, t);
}

ProbDist threshold_mitigate(const ProbDist& p, double tau) {
  ProbDist out = p;
  double kept = 0.0;
  bool dropped = false;
  for (double& v : out.p) {
    if (v < tau) {
      if (v != 0.0) dropped = true;
      v = 0.0;
    } else {
      kept += v;
    }
  }
  if (!dropped || kept == 0.0) return p;
  for (double& v : out.p) v /= kept;
  return out;
}

std::vector<double> threshold_grid(int n, double lo, double hi) {
  if (n < 2) throw ValidationError("threshold_grid: need at least two points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return grid;
}

ThresholdSearch optimize_threshold(const Dataset& d, const std::vector<double>& grid) {
  if (d.records.empty()) throw ValidationError("optimize_threshold: empty dataset");
  if (grid.empty()) throw ValidationError("optimize_threshold: empty grid");

  ThresholdSearch best;
  best.medians.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> changes;
    changes.reserve(d.records.size());
    int excluded = 0;
    for (const auto& rec : d.records) {
      const ProbDist mit = threshold_mitigate(rec.p_noisy, grid[g]);
      if (auto c = l1_relative_change(rec.p_ideal, mit, rec.p_noisy))
        changes.push_back(*c);
      else
        ++excluded;
    }
    if (changes.empty())
      throw ValidationError("optimize_threshold: every record has p_noisy equal to p_ideal");
    const double med = percentile(changes, 50.0);
    best.medians.push_back(med);
    if (g == 0 || med < best.median_l1rc) {
      best.tau = grid[g];
      best.median_l1rc = med;
      best.excluded = excluded;
    }
  }
  return best;
}

int count_2q_gates(const Circuit& c) {
  return static_cast<int>(
      std::count_if(c.ops.begin(), c.ops.end(), [](const GateOp& op) { return op.is_two_qubit(); }));
}

namespace {

double mean_edge_error(const std::set<std::pair<int, int>>& edges, const BackendSnapshot& b) {
  if (edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [c, t] : edges) {
    const auto it = b.gate_error.find(cx_key(c, t));
    if (it == b.gate_error.end())
      throw ValidationError("effective_e2q: no calibration for edge " + cx_key(c, t));
    sum += it->second;
  }
  return sum / static_cast<double>(edges.size());
}

}  // namespace

double effective_e2q(const Circuit& c, const BackendSnapshot& b) {
  std::set<std::pair<int, int>> edges;
  for (const auto& op : c.ops)
    if (op.is_two_qubit()) edges.emplace(op.q0, op.q1);
  return mean_edge_error(edges, b);
}

double effective_e2q(const EncodedCircuit& e, const BackendSnapshot& b) {
  std::set<std::pair<int, int>> edges;
  for (const auto& [c, t] : cx_pairs(e)) edges.emplace(c, t);
  return mean_edge_error(edges, b);
}

int repolarizer_t(const EncodedCircuit& e, RepolarizerTMode mode) {
  return mode == RepolarizerTMode::CxCount ? count_cx(e) : e.depth();
}

}  // namespace qem
