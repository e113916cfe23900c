#include <doctest.h>

#include "qemlab/backend.hpp"
#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"
#include "qemlab/synth.hpp"

using namespace qem;

namespace {

BackendSnapshot sample() {
  Rng rng(11);
  return gen_snapshot(SynthPoolConfig{}, rng, "b0");
}

}  // namespace

TEST_CASE("canonical key set has 38 keys in string order") {
  const auto& keys = canonical_gate_keys();
  REQUIRE(keys.size() == 38);
  CHECK(keys.front() == "cx:0,1");
  CHECK(keys[7] == "cx:4,3");
  CHECK(keys[8] == "id:0");
  CHECK(keys.back() == "x:4");
  for (std::size_t i = 1; i < keys.size(); ++i) CHECK(keys[i - 1] < keys[i]);
}

TEST_CASE("flatten produces the documented 101-slot layout") {
  const auto b = sample();
  const auto flat = flatten_backend(b);
  REQUIRE(flat.size() == 101);
  for (int q = 0; q < kNumQubits; ++q) {
    CHECK(flat[q] == b.freq_ghz[q]);
    CHECK(flat[5 + q] == b.t1_us[q]);
    CHECK(flat[10 + q] == b.t2_us[q]);
    CHECK(flat[91 + 2 * q] == b.readout[q][0]);
    CHECK(flat[92 + 2 * q] == b.readout[q][1]);
  }
  const auto& keys = canonical_gate_keys();
  for (std::size_t k = 0; k < keys.size(); ++k) {
    CHECK(flat[15 + k] == b.gate_error.at(keys[k]));
    CHECK(flat[53 + k] == b.gate_time_ns.at(keys[k]));
  }
}

TEST_CASE("missing calibration key is named in the error") {
  auto b = sample();
  b.gate_error.erase("cx:2,1");
  try {
    validate_snapshot(b);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("cx:2,1") != std::string::npos);
  }
}

TEST_CASE("unknown keys and bad ranges are rejected") {
  auto b = sample();
  b.gate_error["h:0"] = 0.1;
  CHECK_THROWS_AS(validate_snapshot(b), ValidationError);

  auto c = sample();
  c.gate_error["x:0"] = 1.5;
  CHECK_THROWS_AS(validate_snapshot(c), ValidationError);

  auto d = sample();
  d.readout[2][0] = -0.1;
  CHECK_THROWS_AS(validate_snapshot(d), ValidationError);
}

TEST_CASE("t2 above the 2*t1 bound warns instead of failing") {
  auto b = sample();
  b.t2_us[1] = 3.0 * b.t1_us[1];
  const auto warnings = validate_snapshot(b);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("qubit 1") != std::string::npos);
}

TEST_CASE("json round trip is bit exact") {
  const auto b = sample();
  const auto b2 = snapshot_from_json(snapshot_to_json(b));
  CHECK(b2.device == b.device);
  CHECK(b2.freq_ghz == b.freq_ghz);
  CHECK(b2.t1_us == b.t1_us);
  CHECK(b2.t2_us == b.t2_us);
  CHECK(b2.gate_error == b.gate_error);
  CHECK(b2.gate_time_ns == b.gate_time_ns);
  CHECK(b2.readout == b.readout);
}
