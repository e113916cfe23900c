#pragma once

#include <array>
#include <cstddef>

namespace qem {

inline constexpr int kNumQubits = 5;
inline constexpr int kDim = 1 << kNumQubits;  // 32 outcomes

// Probability distribution over the 32 computational-basis outcomes.
// Bit order: qubit 0 is the least significant bit, index = sum_q b_q 2^q.
struct ProbDist {
  std::array<double, kDim> p{};

  double& operator[](std::size_t i) { return p[i]; }
  double operator[](std::size_t i) const { return p[i]; }

  static ProbDist uniform();
  static ProbDist delta(int outcome);

  double sum() const;
  // Entries must be nonnegative and sum to 1 within 1e-9.
  bool valid() const;
  // Divides by the current sum; throws ValidationError on a zero vector.
  void renormalize();
};

double l1_distance(const ProbDist& a, const ProbDist& b);

}  // namespace qem
