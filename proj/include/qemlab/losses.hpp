#pragma once

#include <array>
#include <string>

#include "qemlab/prob_dist.hpp"

namespace qem {

enum class LossKind { KL, ReverseKL, JS, CrossEntropy, MSE, Hellinger, KLplusL1 };

struct LossSpec {
  LossKind kind = LossKind::KL;
  double lambda_l1 = 0.1;   // KLplusL1 only
  double entropy_beta = 0.0;  // adds beta * sum q ln q (negative entropy)
};

// Scalar loss of model output q against target p. Log terms follow the same
// floor conventions as kl_divergence: entries of the left argument at or
// below the floor contribute nothing and the right argument is clamped.
double loss_value(const LossSpec& spec, const double* q, const double* p);
double loss_value(const LossSpec& spec, const ProbDist& q, const ProbDist& p);

// dL/dq, the exact derivative of loss_value away from its floor kinks
// (zero subgradient on them).
std::array<double, kDim> loss_grad(const LossSpec& spec, const double* q, const double* p);

const char* loss_name(LossKind kind);
LossKind parse_loss(const std::string& name);

}  // namespace qem
