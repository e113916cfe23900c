#include "qemlab/sampling.hpp"

#include <algorithm>
#include <array>

#include "qemlab/error.hpp"

namespace qem {

ProbDist sample_shots(const ProbDist& p, int shots, Rng& rng) {
  if (shots <= 0) throw ValidationError("shots must be positive");
  std::array<double, kDim> cdf;
  double acc = 0.0;
  for (int i = 0; i < kDim; ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  std::array<std::int64_t, kDim> counts{};
  for (int s = 0; s < shots; ++s) {
    const double u = rng.u01() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int idx = std::min<int>(static_cast<int>(it - cdf.begin()), kDim - 1);
    ++counts[idx];
  }
  ProbDist out;
  for (int i = 0; i < kDim; ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return out;
}

}  // namespace qem
