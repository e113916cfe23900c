#pragma once

#include "qemlab/prob_dist.hpp"
#include "qemlab/rng.hpp"

namespace qem {

// Multinomial frequencies from `shots` independent CDF-inversion draws.
// Zero-probability outcomes are never drawn; a delta comes back exactly.
ProbDist sample_shots(const ProbDist& p, int shots, Rng& rng);

}  // namespace qem
