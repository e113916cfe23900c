#include "qemlab/circuit_gen.hpp"

#include <cmath>

#include "qemlab/error.hpp"

namespace qem {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void emit_h(std::vector<GateOp>& ops, int q) {
  ops.push_back(GateOp::rz(q, kPi / 2));
  ops.push_back(GateOp::sx(q));
  ops.push_back(GateOp::rz(q, kPi / 2));
}

}  // namespace

std::vector<GateOp> route_cx(int control, int target) {
  if (control == target) throw ValidationError("cx needs two distinct qubits");
  if (coupled(control, target)) return {GateOp::cx(control, target)};
  const int mid = control + (target > control ? 1 : -1);
  std::vector<GateOp> ops{GateOp::cx(control, mid)};
  const auto inner = route_cx(mid, target);
  ops.insert(ops.end(), inner.begin(), inner.end());
  ops.push_back(GateOp::cx(control, mid));
  ops.insert(ops.end(), inner.begin(), inner.end());
  return ops;
}

std::vector<GateOp> compile_gadget(const PauliString& p, double alpha) {
  std::vector<int> active;
  for (int q = 0; q < kNumQubits; ++q) {
    if (p[q] != Pauli::I) active.push_back(q);
  }
  if (active.empty()) return {};

  std::vector<GateOp> ops;
  for (int q : active) {
    if (p[q] == Pauli::X) {
      emit_h(ops, q);
    } else if (p[q] == Pauli::Y) {
      ops.push_back(GateOp::rz(q, -kPi / 2));
      emit_h(ops, q);
    }
  }
  for (std::size_t i = 0; i + 1 < active.size(); ++i) {
    const auto seg = route_cx(active[i], active[i + 1]);
    ops.insert(ops.end(), seg.begin(), seg.end());
  }
  ops.push_back(GateOp::rz(active.back(), 2.0 * alpha));
  for (std::size_t i = active.size() - 1; i-- > 0;) {
    const auto seg = route_cx(active[i], active[i + 1]);
    ops.insert(ops.end(), seg.begin(), seg.end());
  }
  for (int q : active) {
    if (p[q] == Pauli::X) {
      emit_h(ops, q);
    } else if (p[q] == Pauli::Y) {
      emit_h(ops, q);
      ops.push_back(GateOp::rz(q, kPi / 2));
    }
  }
  return ops;
}

Circuit gen_pauli_circuit(int t_gadgets, std::uint64_t seed) {
  Rng rng(seed);
  Circuit c;
  c.meta = {"pauli", t_gadgets, seed};
  for (int t = 0; t < t_gadgets; ++t) {
    PauliString p{};
    for (int q = 0; q < kNumQubits; ++q) {
      p[q] = static_cast<Pauli>(rng.below(4));
    }
    const double alpha = kTwoPi * rng.u01();
    const auto ops = compile_gadget(p, alpha);
    c.ops.insert(c.ops.end(), ops.begin(), ops.end());
  }
  for (int q = 0; q < kNumQubits; ++q) c.ops.push_back(GateOp::measure(q));
  return c;
}

Circuit gen_random_circuit(int t_steps, std::uint64_t seed) {
  Rng rng(seed);
  Circuit c;
  c.meta = {"random", t_steps, seed};
  for (int t = 0; t < t_steps; ++t) {
    const int i = static_cast<int>(rng.below(kNumQubits));
    const int g = static_cast<int>(rng.below(4));  // {Rz, X, SX, CX}
    if (g == 3) {
      int j = static_cast<int>(rng.below(kNumQubits - 1));
      if (j >= i) ++j;
      const auto seg = route_cx(i, j);
      c.ops.insert(c.ops.end(), seg.begin(), seg.end());
    } else if (g == 0) {
      c.ops.push_back(GateOp::rz(i, kTwoPi * rng.u01()));
    } else if (g == 1) {
      c.ops.push_back(GateOp::x(i));
    } else {
      c.ops.push_back(GateOp::sx(i));
    }
  }
  for (int q = 0; q < kNumQubits; ++q) c.ops.push_back(GateOp::measure(q));
  return c;
}

}  // namespace qem
