#include "qemlab/prob_dist.hpp"

#include <cmath>

#include "qemlab/error.hpp"

namespace qem {

ProbDist ProbDist::uniform() {
  ProbDist d;
  d.p.fill(1.0 / kDim);
  return d;
}

ProbDist ProbDist::delta(int outcome) {
  ProbDist d;
  d.p[outcome] = 1.0;
  return d;
}

double ProbDist::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

bool ProbDist::valid() const {
  for (double v : p) {
    if (!(v >= 0.0)) return false;
  }
  return std::abs(sum() - 1.0) <= 1e-9;
}

void ProbDist::renormalize() {
  const double s = sum();
  if (s <= 0.0) throw ValidationError("cannot renormalize a zero distribution");
  for (double& v : p) v /= s;
}

double l1_distance(const ProbDist& a, const ProbDist& b) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += std::abs(a.p[i] - b.p[i]);
  return s;
}

}  // namespace qem
