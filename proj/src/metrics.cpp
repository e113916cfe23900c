#include "qemlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"

namespace qem {

double kl_divergence(const ProbDist& p, const ProbDist& q) {
  double sum = 0.0;
  for (int i = 0; i < kDim; ++i) {
    if (p.p[i] <= kKlFloor) continue;
    const double qi = std::max(q.p[i], kKlFloor);
    sum += p.p[i] * std::log(p.p[i] / qi);
  }
  return sum;
}

double signal_kl(const ProbDist& ideal) { return kl_divergence(ideal, ProbDist::uniform()); }

double noise_kl(const ProbDist& ideal, const ProbDist& noisy) {
  return kl_divergence(ideal, noisy);
}

std::optional<double> l1_relative_change(const ProbDist& ideal, const ProbDist& mit,
                                         const ProbDist& noisy) {
  const double denom = l1_distance(ideal, noisy);
  if (denom == 0.0) return std::nullopt;
  return (l1_distance(ideal, mit) - denom) / denom;
}

BinAssignment bin_by_signal(const std::vector<double>& signals, int n_bins) {
  if (signals.empty()) throw ValidationError("bin_by_signal: no values");
  if (n_bins < 1) throw ValidationError("bin_by_signal: n_bins must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(signals.begin(), signals.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) n_bins = 1;

  BinAssignment out;
  out.edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b) out.edges[b] = lo + (hi - lo) * b / n_bins;
  out.labels.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    if (b == 0)
      out.labels[b] = "L";
    else if (b == n_bins - 1)
      out.labels[b] = "H";
    else
      out.labels[b] = "B" + std::to_string(b + 1);
  }

  out.bin.reserve(signals.size());
  const double width = hi - lo;
  for (double s : signals) {
    int b = width > 0 ? static_cast<int>((s - lo) / width * n_bins) : 0;
    b = std::clamp(b, 0, n_bins - 1);  // puts s = hi in the top bin
    out.bin.push_back(b);
  }
  return out;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw ValidationError("percentile: no values");
  std::sort(values.begin(), values.end());
  const double rank = pct / 100.0 * (static_cast<double>(values.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Summary summarize(const std::vector<double>& values, int excluded, int n_boot,
                  std::uint64_t seed) {
  if (values.empty()) throw ValidationError("summarize: no values");
  const auto n = values.size();

  Summary s;
  s.n = static_cast<int>(n);
  s.excluded = excluded;
  s.median = percentile(values, 50.0);
  s.p01 = percentile(values, 1.0);
  s.p25 = percentile(values, 25.0);
  s.p75 = percentile(values, 75.0);
  s.p99 = percentile(values, 99.0);
  s.pct_improved =
      100.0 * static_cast<double>(std::count_if(values.begin(), values.end(),
                                                [](double v) { return v < 0.0; })) /
      static_cast<double>(n);

  if (n_boot > 1 && n > 1) {
    Rng rng(seed);
    std::vector<double> medians(static_cast<std::size_t>(n_boot));
    std::vector<double> resample(n);
    for (auto& m : medians) {
      for (auto& r : resample) r = values[rng.below(n)];
      m = percentile(resample, 50.0);
    }
    double mean = 0.0;
    for (double m : medians) mean += m;
    mean /= static_cast<double>(n_boot);
    double var = 0.0;
    for (double m : medians) var += (m - mean) * (m - mean);
    var /= static_cast<double>(n_boot - 1);
    s.se_median = std::sqrt(var);
  }
  return s;
}

}  // namespace qem
