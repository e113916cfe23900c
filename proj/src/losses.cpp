#include "qemlab/losses.hpp"

#include <cmath>

#include "qemlab/error.hpp"
#include "qemlab/metrics.hpp"

namespace qem {

namespace {

// sum_i a_i ln(a_i / b_i) with the metrics floor conventions
double kl_terms(const double* a, const double* b) {
  double sum = 0.0;
  for (int i = 0; i < kDim; ++i) {
    if (a[i] <= kKlFloor) continue;
    sum += a[i] * std::log(a[i] / std::max(b[i], kKlFloor));
  }
  return sum;
}

double base_value(LossKind kind, double lambda_l1, const double* q, const double* p) {
  switch (kind) {
    case LossKind::KL:
      return kl_terms(p, q);
    case LossKind::ReverseKL:
      return kl_terms(q, p);
    case LossKind::JS: {
      double m[kDim];
      for (int i = 0; i < kDim; ++i) m[i] = 0.5 * (p[i] + q[i]);
      return 0.5 * kl_terms(p, m) + 0.5 * kl_terms(q, m);
    }
    case LossKind::CrossEntropy: {
      double sum = 0.0;
      for (int i = 0; i < kDim; ++i) {
        if (p[i] <= kKlFloor) continue;
        sum -= p[i] * std::log(std::max(q[i], kKlFloor));
      }
      return sum;
    }
    case LossKind::MSE: {
      double sum = 0.0;
      for (int i = 0; i < kDim; ++i) sum += (p[i] - q[i]) * (p[i] - q[i]);
      return sum;
    }
    case LossKind::Hellinger: {
      double sum = 0.0;
      for (int i = 0; i < kDim; ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        sum += d * d;
      }
      return 0.5 * sum;
    }
    case LossKind::KLplusL1: {
      double l1 = 0.0;
      for (int i = 0; i < kDim; ++i) l1 += std::fabs(p[i] - q[i]);
      return kl_terms(p, q) + lambda_l1 * l1;
    }
  }
  throw ValidationError("loss_value: unknown loss kind");
}

}  // namespace

double loss_value(const LossSpec& spec, const double* q, const double* p) {
  double v = base_value(spec.kind, spec.lambda_l1, q, p);
  if (spec.entropy_beta != 0.0) {
    // minus beta * H(q), i.e. plus beta * sum q ln q
    double neg_entropy = 0.0;
    for (int i = 0; i < kDim; ++i) {
      if (q[i] <= kKlFloor) continue;
      neg_entropy += q[i] * std::log(q[i]);
    }
    v += spec.entropy_beta * neg_entropy;
  }
  return v;
}

double loss_value(const LossSpec& spec, const ProbDist& q, const ProbDist& p) {
  return loss_value(spec, q.p.data(), p.p.data());
}

std::array<double, kDim> loss_grad(const LossSpec& spec, const double* q, const double* p) {
  std::array<double, kDim> g{};
  switch (spec.kind) {
    case LossKind::KL:
      for (int i = 0; i < kDim; ++i)
        if (p[i] > kKlFloor && q[i] > kKlFloor) g[i] = -p[i] / q[i];
      break;
    case LossKind::ReverseKL:
      for (int i = 0; i < kDim; ++i)
        if (q[i] > kKlFloor) g[i] = std::log(q[i] / std::max(p[i], kKlFloor)) + 1.0;
      break;
    case LossKind::JS:
      for (int i = 0; i < kDim; ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > kKlFloor && m > kKlFloor) g[i] += -p[i] / (4.0 * m);
        if (q[i] > kKlFloor) {
          g[i] += 0.5 * (std::log(q[i] / std::max(m, kKlFloor)) + 1.0);
          if (m > kKlFloor) g[i] += -q[i] / (4.0 * m);
        }
      }
      break;
    case LossKind::CrossEntropy:
      for (int i = 0; i < kDim; ++i)
        if (p[i] > kKlFloor && q[i] > kKlFloor) g[i] = -p[i] / q[i];
      break;
    case LossKind::MSE:
      for (int i = 0; i < kDim; ++i) g[i] = 2.0 * (q[i] - p[i]);
      break;
    case LossKind::Hellinger:
      for (int i = 0; i < kDim; ++i) {
        if (q[i] <= 0.0) continue;  // kink at the origin
        const double sq = std::sqrt(q[i]);
        g[i] = (sq - std::sqrt(p[i])) / (2.0 * sq);
      }
      break;
    case LossKind::KLplusL1:
      for (int i = 0; i < kDim; ++i) {
        if (p[i] > kKlFloor && q[i] > kKlFloor) g[i] = -p[i] / q[i];
        if (q[i] > p[i])
          g[i] += spec.lambda_l1;
        else if (q[i] < p[i])
          g[i] -= spec.lambda_l1;
      }
      break;
  }
  if (spec.entropy_beta != 0.0)
    for (int i = 0; i < kDim; ++i)
      if (q[i] > kKlFloor) g[i] += spec.entropy_beta * (std::log(q[i]) + 1.0);
  return g;
}

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::KL: return "kl";
    case LossKind::ReverseKL: return "rkl";
    case LossKind::JS: return "js";
    case LossKind::CrossEntropy: return "ce";
    case LossKind::MSE: return "mse";
    case LossKind::Hellinger: return "hellinger";
    case LossKind::KLplusL1: return "kl_l1";
  }
  return "unknown";
}

LossKind parse_loss(const std::string& name) {
  if (name == "kl") return LossKind::KL;
  if (name == "rkl") return LossKind::ReverseKL;
  if (name == "js") return LossKind::JS;
  if (name == "ce") return LossKind::CrossEntropy;
  if (name == "mse") return LossKind::MSE;
  if (name == "hellinger") return LossKind::Hellinger;
  if (name == "kl_l1") return LossKind::KLplusL1;
  throw ValidationError("unknown loss '" + name + "'");
}

}  // namespace qem
