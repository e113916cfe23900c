#include "qemlab/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qemlab/error.hpp"

namespace qem {

namespace {

constexpr double kPi = 3.14159265358979323846;

double rz_entry(double angle) {
  double turns = std::fmod(angle / kPi, 2.0);
  if (turns < 0.0) turns += 2.0;
  return turns / 2.0;
}

int key_index(const std::string& key) {
  static const std::map<std::string, int> index = [] {
    std::map<std::string, int> m;
    const auto& keys = canonical_gate_keys();
    for (int i = 0; i < static_cast<int>(keys.size()); ++i) m[keys[i]] = i;
    return m;
  }();
  return index.at(key);
}

}  // namespace

std::vector<std::vector<GateOp>> layer_circuit(const Circuit& c) {
  std::vector<std::vector<GateOp>> layers;
  std::array<std::size_t, kNumQubits> next_free{};
  for (const GateOp& op : c.ops) {
    std::size_t layer = next_free[op.q0];
    if (op.is_two_qubit()) layer = std::max(layer, next_free[op.q1]);
    if (layer >= layers.size()) layers.resize(layer + 1);
    layers[layer].push_back(op);
    next_free[op.q0] = layer + 1;
    if (op.is_two_qubit()) next_free[op.q1] = layer + 1;
  }
  return layers;
}

EncodedCircuit encode_circuit(const Circuit& c, int pad_depth) {
  const auto layered = layer_circuit(c);
  if (pad_depth < static_cast<int>(layered.size())) {
    throw ValidationError("pad_depth " + std::to_string(pad_depth) +
                          " smaller than circuit depth " + std::to_string(layered.size()));
  }
  EncodedCircuit e;
  e.pad_depth = pad_depth;
  e.layers.resize(layered.size());
  for (std::size_t l = 0; l < layered.size(); ++l) {
    EncodedLayer& m = e.layers[l];
    for (auto& row : m) row.fill(0.0);
    for (const GateOp& op : layered[l]) {
      switch (op.kind) {
        case GateKind::X: m[op.q0][0] = 1.0; break;
        case GateKind::SX: m[op.q0][1] = 1.0; break;
        case GateKind::Rz: m[op.q0][2] = rz_entry(op.angle); break;
        case GateKind::CX:
          m[op.q0][3] = -(1.0 + op.q1);
          m[op.q1][3] = +(1.0 + op.q0);
          break;
        case GateKind::Measure: m[op.q0][4] = 1.0; break;
      }
    }
  }
  return e;
}

void validate_encoding(const EncodedCircuit& e) {
  if (e.pad_depth < e.depth()) throw ValidationError("pad_depth smaller than depth");
  for (std::size_t l = 0; l < e.layers.size(); ++l) {
    const EncodedLayer& m = e.layers[l];
    const auto bad = [&](int q, const std::string& why) {
      throw ValidationError("layer " + std::to_string(l) + " qubit " + std::to_string(q) +
                            ": " + why);
    };
    for (int q = 0; q < kNumQubits; ++q) {
      int nonzero = 0;
      for (double v : m[q]) nonzero += (v != 0.0);
      if (nonzero > 1) bad(q, "row has more than one active column");
      if (m[q][0] != 0.0 && m[q][0] != 1.0) bad(q, "bad X entry");
      if (m[q][1] != 0.0 && m[q][1] != 1.0) bad(q, "bad SX entry");
      if (m[q][2] < 0.0 || m[q][2] >= 1.0) bad(q, "Rz entry outside [0,1)");
      if (m[q][4] != 0.0 && m[q][4] != 1.0) bad(q, "bad measure entry");
      const double v = m[q][3];
      if (v != 0.0) {
        const double other = std::abs(v) - 1.0;
        if (other != std::floor(other) || other < 0 || other >= kNumQubits) {
          bad(q, "CX entry does not point at a qubit");
        }
        const int o = static_cast<int>(other);
        if (v < 0.0 && m[o][3] != 1.0 + q) bad(q, "CX target row does not point back");
        if (v > 0.0 && m[o][3] != -(1.0 + q)) bad(q, "CX control row does not point back");
      }
    }
  }
}

Circuit decode_encoding(const EncodedCircuit& e) {
  validate_encoding(e);
  Circuit c;
  for (const EncodedLayer& m : e.layers) {
    for (int q = 0; q < kNumQubits; ++q) {
      if (m[q][0] == 1.0) c.ops.push_back(GateOp::x(q));
      if (m[q][1] == 1.0) c.ops.push_back(GateOp::sx(q));
      if (m[q][2] != 0.0) c.ops.push_back(GateOp::rz(q, m[q][2] * 2.0 * kPi));
      if (m[q][3] < 0.0) c.ops.push_back(GateOp::cx(q, static_cast<int>(-m[q][3] - 1.0)));
      if (m[q][4] == 1.0) c.ops.push_back(GateOp::measure(q));
    }
  }
  return c;
}

std::vector<double> flatten_inputs(const EncodedCircuit& e, const BackendSnapshot& b) {
  std::vector<double> out(static_cast<std::size_t>(e.pad_depth) * 25 + kBackendParams, 0.0);
  std::size_t i = 0;
  for (const EncodedLayer& m : e.layers) {
    for (int q = 0; q < kNumQubits; ++q) {
      for (int col = 0; col < kNumQubits; ++col) out[i + q * 5 + col] = m[q][col];
    }
    i += 25;
  }
  const auto flat = flatten_backend(b);
  std::copy(flat.begin(), flat.end(), out.begin() + static_cast<std::size_t>(e.pad_depth) * 25);
  return out;
}

LayerEmbedding embed_layers(const EncodedCircuit& e, const BackendSnapshot& b) {
  const auto flat = flatten_backend(b);
  LayerEmbedding out;
  out.rows.resize(e.pad_depth);
  out.mask.assign(e.pad_depth, -2.0);
  for (auto& row : out.rows) row.fill(0.0);

  const auto put_key = [&](std::array<double, kEmbedWidth>& row, const std::string& key) {
    const int k = key_index(key);
    row[25 + 15 + k] = flat[15 + k];
    row[25 + 53 + k] = flat[53 + k];
  };
  const auto put_qubit = [&](std::array<double, kEmbedWidth>& row, int q) {
    row[25 + q] = flat[q];
    row[25 + 5 + q] = flat[5 + q];
    row[25 + 10 + q] = flat[10 + q];
  };

  for (int l = 0; l < e.depth(); ++l) {
    const EncodedLayer& m = e.layers[l];
    auto& row = out.rows[l];
    out.mask[l] = 0.0;
    for (int q = 0; q < kNumQubits; ++q) {
      for (int col = 0; col < kNumQubits; ++col) row[q * 5 + col] = m[q][col];
      if (m[q][0] == 1.0) {
        put_qubit(row, q);
        put_key(row, gate_key("x", q));
      } else if (m[q][1] == 1.0) {
        put_qubit(row, q);
        put_key(row, gate_key("sx", q));
      } else if (m[q][2] != 0.0) {
        put_qubit(row, q);
        put_key(row, gate_key("rz", q));
      } else if (m[q][3] < 0.0) {
        const int t = static_cast<int>(-m[q][3] - 1.0);
        put_qubit(row, q);
        put_qubit(row, t);
        put_key(row, cx_key(q, t));
      } else if (m[q][4] == 1.0) {
        put_qubit(row, q);
        put_key(row, gate_key("measure", q));
        row[25 + 91 + 2 * q] = flat[91 + 2 * q];
        row[25 + 92 + 2 * q] = flat[92 + 2 * q];
      }
    }
  }
  return out;
}

std::vector<std::pair<int, int>> cx_pairs(const EncodedCircuit& e) {
  std::vector<std::pair<int, int>> pairs;
  for (const EncodedLayer& m : e.layers) {
    for (int q = 0; q < kNumQubits; ++q) {
      if (m[q][3] < 0.0) pairs.emplace_back(q, static_cast<int>(-m[q][3] - 1.0));
    }
  }
  return pairs;
}

int count_cx(const EncodedCircuit& e) { return static_cast<int>(cx_pairs(e).size()); }

}  // namespace qem
