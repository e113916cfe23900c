#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qemlab/prob_dist.hpp"

namespace qem {

// Entries of p at or below this floor contribute nothing to a KL sum; q is
// clamped here for the terms that do contribute.
inline constexpr double kKlFloor = 1e-12;

// sum_i p_i * ln(p_i / q_i) with the floor conventions above. Exactly zero
// for identical inputs and exact for deltas against uniform.
double kl_divergence(const ProbDist& p, const ProbDist& q);

// KL from the ideal distribution to uniform: how far the target sits from
// structureless output.
double signal_kl(const ProbDist& ideal);

// KL from the ideal to the noisy distribution: how much the channel moved it.
double noise_kl(const ProbDist& ideal, const ProbDist& noisy);

// (||ideal - mit||_1 - ||ideal - noisy||_1) / ||ideal - noisy||_1.
// Negative means mitigation helped. Empty when the denominator is zero.
std::optional<double> l1_relative_change(const ProbDist& ideal, const ProbDist& mit,
                                         const ProbDist& noisy);

struct BinAssignment {
  std::vector<int> bin;             // per input value
  std::vector<std::string> labels;  // per bin, low to high
  std::vector<double> edges;        // n_bins + 1 boundaries
};

// Equal-width bins spanning [min, max] of the values. The top edge is
// inclusive; all-equal input collapses to a single bin.
BinAssignment bin_by_signal(const std::vector<double>& signals, int n_bins = 6);

// Linear-interpolation percentile (rank = pct/100 * (n-1)) of a copy.
double percentile(std::vector<double> values, double pct);

struct Summary {
  int n = 0;
  int excluded = 0;
  double median = 0.0;
  double se_median = 0.0;  // bootstrap
  double p01 = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double p99 = 0.0;
  double pct_improved = 0.0;  // share of values < 0, in percent
};

// Median with a seeded bootstrap standard error (n_boot resamples, sample
// std of the resample medians), quartiles and whisker percentiles. Throws on
// empty input.
Summary summarize(const std::vector<double>& values, int excluded = 0, int n_boot = 1000,
                  std::uint64_t seed = 0);

}  // namespace qem
