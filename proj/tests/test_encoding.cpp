#include <doctest.h>

#include <cmath>

#include "qemlab/circuit_gen.hpp"
#include "qemlab/encoding.hpp"
#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"
#include "qemlab/statevector.hpp"
#include "qemlab/synth.hpp"

using namespace qem;

namespace {

const double kPi = 3.14159265358979323846;

BackendSnapshot test_snapshot() {
  Rng rng(404);
  return gen_snapshot(SynthPoolConfig{}, rng, "enc_test");
}

}  // namespace

TEST_CASE("table rows for each gate kind") {
  Circuit c;
  c.ops = {GateOp::x(0), GateOp::sx(1), GateOp::rz(2, kPi / 2), GateOp::cx(1, 2),
           GateOp::measure(4)};
  const EncodedCircuit e = encode_circuit(c, 4);
  REQUIRE(e.depth() == 2);  // cx(1,2) waits for sx(1) and rz(2)
  const EncodedLayer& l0 = e.layers[0];
  CHECK(l0[0] == std::array<double, 5>{1, 0, 0, 0, 0});
  CHECK(l0[1] == std::array<double, 5>{0, 1, 0, 0, 0});
  CHECK(l0[2] == std::array<double, 5>{0, 0, 0.25, 0, 0});  // (pi/2 / pi mod 2)/2
  CHECK(l0[4] == std::array<double, 5>{0, 0, 0, 0, 1});
  const EncodedLayer& l1 = e.layers[1];
  CHECK(l1[1] == std::array<double, 5>{0, 0, 0, -3, 0});  // control, 0-based target 2
  CHECK(l1[2] == std::array<double, 5>{0, 0, 0, 2, 0});   // target, 0-based control 1
}

TEST_CASE("rz wraps modulo 2*pi turns") {
  Circuit c;
  c.ops = {GateOp::rz(0, 5.0 * kPi)};  // 5 half-turns = 1 half-turn
  const EncodedCircuit e = encode_circuit(c, 1);
  CHECK(e.layers[0][0][2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("asap layering packs independent ops and counts layers") {
  Circuit c;
  c.ops = {GateOp::x(0), GateOp::cx(0, 1)};
  for (int q = 0; q < kNumQubits; ++q) c.ops.push_back(GateOp::measure(q));
  const auto layers = layer_circuit(c);
  CHECK(layers.size() == 3);

  Circuit d;
  d.ops = {GateOp::x(0), GateOp::x(0)};
  CHECK(layer_circuit(d).size() == 2);
  Circuit e;
  e.ops = {GateOp::x(0), GateOp::x(1)};
  CHECK(layer_circuit(e).size() == 1);
}

TEST_CASE("flatten puts the single X row first and the backend tail last") {
  Circuit c;
  c.ops = {GateOp::x(0)};
  const auto b = test_snapshot();
  const auto v = flatten_inputs(encode_circuit(c, 1), b);
  REQUIRE(v.size() == 25 + 101);
  CHECK(v[0] == 1.0);
  for (int i = 1; i < 25; ++i) CHECK(v[i] == 0.0);
  const auto flat = flatten_backend(b);
  for (int i = 0; i < kBackendParams; ++i) CHECK(v[25 + i] == flat[i]);
}

TEST_CASE("flatten length follows pad_depth") {
  Circuit c;
  c.ops = {GateOp::x(0)};
  const auto b = test_snapshot();
  CHECK(flatten_inputs(encode_circuit(c, 208), b).size() == 208 * 25 + 101);
  CHECK(flatten_inputs(encode_circuit(c, 144), b).size() == 144 * 25 + 101);
}

TEST_CASE("embedding rows carry only the touched backend slots") {
  Circuit c;
  c.ops = {GateOp::x(0), GateOp::measure(3)};
  const auto b = test_snapshot();
  const auto emb = embed_layers(encode_circuit(c, 3), b);
  REQUIRE(emb.rows.size() == 3);
  REQUIRE(emb.mask.size() == 3);
  CHECK(emb.mask[0] == 0.0);
  CHECK(emb.mask[1] == -2.0);
  CHECK(emb.mask[2] == -2.0);

  const auto flat = flatten_backend(b);
  const auto& row = emb.rows[0];
  CHECK(row[0] == 1.0);  // X row for qubit 0
  // qubit 0 physics slots
  CHECK(row[25 + 0] == flat[0]);
  CHECK(row[25 + 5] == flat[5]);
  CHECK(row[25 + 10] == flat[10]);
  // measure on qubit 3: its readout pair is present
  CHECK(row[25 + 91 + 6] == flat[91 + 6]);
  CHECK(row[25 + 91 + 7] == flat[91 + 7]);
  // untouched qubit 2 slots stay zero
  CHECK(row[25 + 2] == 0.0);
  CHECK(row[25 + 12] == 0.0);
  // exactly 6 trailing zeros
  for (int i = 126; i < kEmbedWidth; ++i) CHECK(row[i] == 0.0);
  // padding rows are all zero
  for (double v : emb.rows[1]) CHECK(v == 0.0);
}

TEST_CASE("embedding marks gate error and time slots for the acting key") {
  Circuit c;
  c.ops = {GateOp::cx(2, 1)};
  const auto b = test_snapshot();
  const auto emb = embed_layers(encode_circuit(c, 1), b);
  const auto flat = flatten_backend(b);
  const auto& keys = canonical_gate_keys();
  int k = -1;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == "cx:2,1") k = static_cast<int>(i);
  }
  REQUIRE(k >= 0);
  CHECK(emb.rows[0][25 + 15 + k] == flat[15 + k]);
  CHECK(emb.rows[0][25 + 53 + k] == flat[53 + k]);
  // both endpoint qubits get their physics slots
  CHECK(emb.rows[0][25 + 1] == flat[1]);
  CHECK(emb.rows[0][25 + 2] == flat[2]);
}

TEST_CASE("decode inverts encode and re-encoding is bit exact") {
  const Circuit c = gen_pauli_circuit(4, 2024);
  const EncodedCircuit e = encode_circuit(c, 80);
  const Circuit back = decode_encoding(e);
  const EncodedCircuit e2 = encode_circuit(back, 80);
  REQUIRE(e.depth() == e2.depth());
  for (int l = 0; l < e.depth(); ++l) CHECK(e.layers[l] == e2.layers[l]);
  // decoded circuit behaves identically
  const ProbDist a = ideal_distribution(c);
  const ProbDist b = ideal_distribution(back);
  for (int i = 0; i < kDim; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("validation rejects malformed rows") {
  EncodedCircuit e;
  e.pad_depth = 1;
  EncodedLayer m{};
  m[0] = {1, 1, 0, 0, 0};  // two active columns
  e.layers = {m};
  CHECK_THROWS_AS(validate_encoding(e), ValidationError);

  EncodedLayer cx{};
  cx[0] = {0, 0, 0, -2, 0};  // control points at qubit 1, but no target row
  e.layers = {cx};
  CHECK_THROWS_AS(validate_encoding(e), ValidationError);

  EncodedLayer rz{};
  rz[0] = {0, 0, 1.5, 0, 0};  // Rz entry must be in [0,1)
  e.layers = {rz};
  CHECK_THROWS_AS(validate_encoding(e), ValidationError);
}

TEST_CASE("cx pairs and counts read off the encoding") {
  Circuit c;
  c.ops = {GateOp::cx(0, 1), GateOp::cx(3, 2), GateOp::cx(0, 1)};
  const EncodedCircuit e = encode_circuit(c, 4);
  CHECK(count_cx(e) == 3);
  const auto pairs = cx_pairs(e);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0] == std::pair<int, int>{0, 1});
  CHECK(pairs[1] == std::pair<int, int>{3, 2});
}
