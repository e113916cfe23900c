#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qemlab/circuit.hpp"

namespace qem {

inline constexpr int kBackendParams = 101;

// One calibration snapshot of the 5-qubit chain device.
//
// The scalar content is exactly 101 numbers with a fixed canonical order:
//   [0..4]    qubit frequencies (GHz)
//   [5..9]    T1 (us)
//   [10..14]  T2 (us)
//   [15..52]  gate errors, one per canonical instruction key
//   [53..90]  gate durations (ns), same key order
//   [91..100] readout errors, per qubit the pair (p(1|0), p(0|1))
//
// Instruction keys cover cx on the 8 directed chain edges plus
// {id, measure, reset, rz, sx, x} on each qubit (38 keys), ordered
// lexicographically by (kind name, qubit tuple) — i.e. plain string order
// of "cx:0,1" .. "x:4".
struct BackendSnapshot {
  std::string device;
  std::string timestamp;
  std::array<double, kNumQubits> freq_ghz{};
  std::array<double, kNumQubits> t1_us{};
  std::array<double, kNumQubits> t2_us{};
  std::map<std::string, double> gate_error;    // canonical keys only
  std::map<std::string, double> gate_time_ns;  // canonical keys only
  std::array<std::array<double, 2>, kNumQubits> readout{};  // [p(1|0), p(0|1)]
};

std::string gate_key(const std::string& kind, int q);
std::string cx_key(int control, int target);

// The 38 canonical instruction keys in canonical (string) order.
const std::vector<std::string>& canonical_gate_keys();

// Missing or unknown instruction keys and out-of-range error rates throw
// ValidationError naming the key. t2 > 2*t1 is unphysical-looking but occurs
// in real calibration data, so it only produces a warning string.
std::vector<std::string> validate_snapshot(const BackendSnapshot& b);

std::array<double, kBackendParams> flatten_backend(const BackendSnapshot& b);

std::string snapshot_to_json(const BackendSnapshot& b);
BackendSnapshot snapshot_from_json(const std::string& text);
BackendSnapshot load_snapshot(const std::string& path);
void save_snapshot(const BackendSnapshot& b, const std::string& path);

}  // namespace qem
