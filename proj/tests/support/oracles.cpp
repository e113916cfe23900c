#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace qem::oracle {

namespace {

using std::complex;
const complex<double> kI(0.0, 1.0);

Eigen::Matrix2cd m2(complex<double> a, complex<double> b, complex<double> c,
                    complex<double> d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}

Eigen::Matrix2cd pauli_2x2(Pauli p) {
  switch (p) {
    case Pauli::I: return m2(1, 0, 0, 1);
    case Pauli::X: return m2(0, 1, 1, 0);
    case Pauli::Y: return m2(0, -kI, kI, 0);
    case Pauli::Z: return m2(1, 0, 0, -1);
  }
  return Eigen::Matrix2cd::Identity();
}

Eigen::Matrix2cd gate_2x2(const GateOp& op) {
  switch (op.kind) {
    case GateKind::X:
      return m2(0, 1, 1, 0);
    case GateKind::SX: {
      // sqrt(X) = exp(i pi/4) exp(-i pi/4 X)
      const auto ph = std::exp(kI * (3.14159265358979323846 / 4.0));
      const double c = std::cos(3.14159265358979323846 / 4.0);
      const double s = std::sin(3.14159265358979323846 / 4.0);
      return ph * (c * m2(1, 0, 0, 1) - kI * s * m2(0, 1, 1, 0));
    }
    case GateKind::Rz: {
      const double h = op.angle / 2.0;
      return m2(std::exp(-kI * h), 0, 0, std::exp(kI * h));
    }
    default:
      throw std::runtime_error("not a 1q gate");
  }
}

int bit(int x, int q) { return (x >> q) & 1; }

M32 embed_cx(int control, int target) {
  M32 m = M32::Zero();
  for (int j = 0; j < kDim; ++j) {
    const int i = bit(j, control) ? (j ^ (1 << target)) : j;
    m(i, j) = 1.0;
  }
  return m;
}

}  // namespace

M32 embed_1q(const Eigen::Matrix2cd& u, int q) {
  M32 m = M32::Zero();
  const int mask = ~(1 << q);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      if ((i & mask) == (j & mask)) m(i, j) = u(bit(i, q), bit(j, q));
    }
  }
  return m;
}

M32 circuit_unitary(const Circuit& c) {
  M32 u = M32::Identity();
  for (const GateOp& op : c.ops) {
    if (op.kind == GateKind::Measure) continue;
    if (op.kind == GateKind::CX) {
      u = embed_cx(op.q0, op.q1) * u;
    } else {
      u = embed_1q(gate_2x2(op), op.q0) * u;
    }
  }
  return u;
}

ProbDist ideal_probs(const Circuit& c) {
  V32 v = V32::Zero();
  v(0) = 1.0;
  v = circuit_unitary(c) * v;
  ProbDist p;
  for (int i = 0; i < kDim; ++i) p[i] = std::norm(v(i));
  return p;
}

M32 pauli_matrix(const PauliString& p) {
  M32 m = M32::Zero();
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      complex<double> v = 1.0;
      for (int q = 0; q < kNumQubits; ++q) {
        v *= pauli_2x2(p[q])(bit(i, q), bit(j, q));
        if (v == 0.0) break;
      }
      m(i, j) = v;
    }
  }
  return m;
}

M32 gadget_unitary(const PauliString& p, double alpha) {
  return std::cos(alpha) * M32::Identity() - kI * std::sin(alpha) * pauli_matrix(p);
}

double unitary_fidelity(const M32& u, const M32& v) {
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(kDim);
}

namespace {

std::vector<M32> depol_kraus_1q(int q, double lambda) {
  std::vector<M32> ks;
  ks.push_back(std::sqrt(1.0 - 0.75 * lambda) * M32::Identity());
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    ks.push_back(std::sqrt(lambda / 4.0) * embed_1q(pauli_2x2(p), q));
  }
  return ks;
}

std::vector<M32> depol_kraus_2q(int qa, int qb, double lambda) {
  std::vector<M32> ks;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double w = (a == 0 && b == 0) ? 1.0 - lambda * 15.0 / 16.0 : lambda / 16.0;
      ks.push_back(std::sqrt(w) * embed_1q(pauli_2x2(static_cast<Pauli>(a)), qa) *
                   embed_1q(pauli_2x2(static_cast<Pauli>(b)), qb));
    }
  }
  return ks;
}

std::vector<M32> depol_kraus_global(double lambda) {
  std::vector<M32> ks;
  for (int code = 0; code < 1024; ++code) {
    PauliString p{};
    int c = code;
    for (int q = 0; q < kNumQubits; ++q) {
      p[q] = static_cast<Pauli>(c & 3);
      c >>= 2;
    }
    const double w = code == 0 ? 1.0 - lambda * 1023.0 / 1024.0 : lambda / 1024.0;
    ks.push_back(std::sqrt(w) * pauli_matrix(p));
  }
  return ks;
}

std::vector<M32> relax_kraus(int q, double e1, double e2) {
  const double gamma = 1.0 - e1;
  const double d2 = std::max(e1 - e2 * e2, 0.0);
  return {embed_1q(m2(1, 0, 0, e2), q),
          embed_1q(m2(0, std::sqrt(gamma), 0, 0), q),
          embed_1q(m2(0, 0, 0, std::sqrt(d2)), q)};
}

M32 kraus_apply(const std::vector<M32>& ks, const M32& rho) {
  M32 out = M32::Zero();
  for (const M32& k : ks) out += k * rho * k.adjoint();
  return out;
}

}  // namespace

ProbDist noisy_probs_kraus(const Circuit& c, const NoiseModel& nm) {
  M32 rho = M32::Zero();
  rho(0, 0) = 1.0;
  for (const GateOp& op : c.ops) {
    if (op.kind == GateKind::Measure) continue;
    const M32 u = op.kind == GateKind::CX ? embed_cx(op.q0, op.q1)
                                          : embed_1q(gate_2x2(op), op.q0);
    rho = u * rho * u.adjoint();
    const std::string key = op.kind == GateKind::CX
                                ? cx_key(op.q0, op.q1)
                                : gate_key(gate_name(op.kind), op.q0);
    const GateChannel ch = nm.gates.at(key);
    if (nm.opts.depolarizing && ch.lambda > 0.0) {
      if (nm.opts.global_depolarizing) {
        rho = kraus_apply(depol_kraus_global(ch.lambda), rho);
      } else if (op.kind == GateKind::CX) {
        rho = kraus_apply(depol_kraus_2q(op.q0, op.q1, ch.lambda), rho);
      } else {
        rho = kraus_apply(depol_kraus_1q(op.q0, ch.lambda), rho);
      }
    }
    if (nm.opts.relaxation && ch.time_ns > 0.0) {
      for (int q : {op.q0, op.q1}) {
        if (q < 0) continue;
        const double e1 = std::exp(-ch.time_ns / nm.t1_ns[q]);
        const double t2 = std::min(nm.t2_ns[q], 2.0 * nm.t1_ns[q]);
        const double e2 = std::exp(-ch.time_ns / t2);
        rho = kraus_apply(relax_kraus(q, e1, e2), rho);
      }
    }
  }
  ProbDist p;
  for (int i = 0; i < kDim; ++i) p[i] = std::max(rho(i, i).real(), 0.0);
  p.renormalize();
  if (nm.opts.readout) {
    Eigen::Matrix<double, kDim, kDim> conf;
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        double v = 1.0;
        for (int q = 0; q < kNumQubits; ++q) {
          v *= nm.confusion[q][2 * bit(i, q) + bit(j, q)];
        }
        conf(i, j) = v;
      }
    }
    Eigen::Matrix<double, kDim, 1> vin;
    for (int i = 0; i < kDim; ++i) vin(i) = p[i];
    const auto vout = (conf * vin).eval();
    for (int i = 0; i < kDim; ++i) p[i] = vout(i);
  }
  return p;
}

namespace {

long double kl_terms_ld(const double* a, const double* b) {
  long double acc = 0.0L;
  for (int i = 0; i < kDim; ++i) {
    if (a[i] <= 1e-12) continue;
    const long double bi = b[i] < 1e-12 ? 1e-12L : static_cast<long double>(b[i]);
    acc += static_cast<long double>(a[i]) * std::log(static_cast<long double>(a[i]) / bi);
  }
  return acc;
}

}  // namespace

double loss_longdouble(const LossSpec& spec, const ProbDist& q, const ProbDist& p) {
  long double v = 0.0L;
  switch (spec.kind) {
    case LossKind::KL:
      v = kl_terms_ld(p.p.data(), q.p.data());
      break;
    case LossKind::ReverseKL:
      v = kl_terms_ld(q.p.data(), p.p.data());
      break;
    case LossKind::JS: {
      double m[kDim];
      for (int i = 0; i < kDim; ++i) m[i] = 0.5 * (p[i] + q[i]);
      v = 0.5L * kl_terms_ld(p.p.data(), m) + 0.5L * kl_terms_ld(q.p.data(), m);
      break;
    }
    case LossKind::CrossEntropy:
      for (int i = 0; i < kDim; ++i) {
        if (p[i] <= 1e-12) continue;
        const long double qi = q[i] < 1e-12 ? 1e-12L : static_cast<long double>(q[i]);
        v -= static_cast<long double>(p[i]) * std::log(qi);
      }
      break;
    case LossKind::MSE:
      for (int i = 0; i < kDim; ++i) {
        const long double d = static_cast<long double>(q[i]) - static_cast<long double>(p[i]);
        v += d * d;
      }
      break;
    case LossKind::Hellinger:
      for (int i = 0; i < kDim; ++i) {
        const long double d = std::sqrt(static_cast<long double>(q[i])) -
                              std::sqrt(static_cast<long double>(p[i]));
        v += 0.5L * d * d;
      }
      break;
    case LossKind::KLplusL1: {
      v = kl_terms_ld(p.p.data(), q.p.data());
      long double l1 = 0.0L;
      for (int i = 0; i < kDim; ++i)
        l1 += std::fabs(static_cast<long double>(q[i]) - static_cast<long double>(p[i]));
      v += static_cast<long double>(spec.lambda_l1) * l1;
      break;
    }
  }
  if (spec.entropy_beta != 0.0) {
    // L - beta * H(Q) with H(Q) = -sum q ln q over entries above the floor.
    for (int i = 0; i < kDim; ++i) {
      if (q[i] <= 1e-12) continue;
      v += static_cast<long double>(spec.entropy_beta) * static_cast<long double>(q[i]) *
           std::log(static_cast<long double>(q[i]));
    }
  }
  return static_cast<double>(v);
}

std::vector<std::array<double, kDim>> mlp_forward_reference(
    const Mlp& m, const std::vector<std::vector<double>>& x_cb,
    const std::vector<std::array<double, kDim>>& p_noisy, bool train_mode) {
  const std::size_t n = x_cb.size();
  const int n_hidden = m.n_hidden();
  const bool correction = m.config().head == Head::Correction;

  std::vector<std::vector<long double>> h(n);
  for (std::size_t s = 0; s < n; ++s) {
    h[s].assign(x_cb[s].begin(), x_cb[s].end());
    if (!correction)
      for (int i = 0; i < kDim; ++i) h[s].push_back(p_noisy[s][i]);
  }

  for (int k = 0; k <= n_hidden; ++k) {
    const auto& L = m.layers[static_cast<std::size_t>(k)];
    const int out = static_cast<int>(L.W.rows());
    const int in = static_cast<int>(L.W.cols());
    std::vector<std::vector<long double>> z(n, std::vector<long double>(out));
    for (std::size_t s = 0; s < n; ++s)
      for (int j = 0; j < out; ++j) {
        long double acc = L.b(j);
        for (int i = 0; i < in; ++i) acc += static_cast<long double>(L.W(j, i)) * h[s][i];
        z[s][j] = acc;
      }
    if (k < n_hidden) {
      const auto& bnk = m.bn[static_cast<std::size_t>(k)];
      for (int j = 0; j < out; ++j) {
        long double mu, var;
        if (train_mode) {
          mu = 0.0L;
          for (std::size_t s = 0; s < n; ++s) mu += z[s][j];
          mu /= static_cast<long double>(n);
          var = 0.0L;
          for (std::size_t s = 0; s < n; ++s) var += (z[s][j] - mu) * (z[s][j] - mu);
          var /= static_cast<long double>(n);
        } else {
          mu = bnk.run_mean(j);
          var = bnk.run_var(j);
        }
        const long double istd = 1.0L / std::sqrt(var + static_cast<long double>(m.bn_epsilon));
        for (std::size_t s = 0; s < n; ++s) {
          const long double y =
              (z[s][j] - mu) * istd * static_cast<long double>(bnk.gamma(j)) +
              static_cast<long double>(bnk.beta(j));
          z[s][j] = m.config().activation == Activation::ReLU ? std::max(0.0L, y) : std::tanh(y);
        }
      }
    }
    for (std::size_t s = 0; s < n; ++s) h[s].assign(z[s].begin(), z[s].end());
  }

  std::vector<std::array<double, kDim>> q(n);
  for (std::size_t s = 0; s < n; ++s) {
    long double u[kDim];
    for (int i = 0; i < kDim; ++i)
      u[i] = correction ? h[s][i] * static_cast<long double>(p_noisy[s][i]) : h[s][i];
    long double mx = u[0];
    for (int i = 1; i < kDim; ++i) mx = std::max(mx, u[i]);
    long double tot = 0.0L;
    for (int i = 0; i < kDim; ++i) {
      u[i] = std::exp(u[i] - mx);
      tot += u[i];
    }
    for (int i = 0; i < kDim; ++i) q[s][i] = static_cast<double>(u[i] / tot);
  }
  return q;
}

double kl_longdouble(const ProbDist& p, const ProbDist& q) {
  long double acc = 0.0L;
  long double comp = 0.0L;
  for (int i = 0; i < kDim; ++i) {
    if (p[i] <= 1e-12) continue;
    const long double qi = q[i] < 1e-12 ? 1e-12L : static_cast<long double>(q[i]);
    const long double term =
        static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / qi);
    const long double y = term - comp;
    const long double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return static_cast<double>(acc);
}

}  // namespace qem::oracle
