#include "qemlab/backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qemlab/error.hpp"

namespace qem {

using nlohmann::json;

std::string gate_key(const std::string& kind, int q) {
  return kind + ":" + std::to_string(q);
}

std::string cx_key(int control, int target) {
  return "cx:" + std::to_string(control) + "," + std::to_string(target);
}

const std::vector<std::string>& canonical_gate_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (int q = 0; q + 1 < kNumQubits; ++q) {
      k.push_back(cx_key(q, q + 1));
      k.push_back(cx_key(q + 1, q));
    }
    for (const char* kind : {"id", "measure", "reset", "rz", "sx", "x"}) {
      for (int q = 0; q < kNumQubits; ++q) k.push_back(gate_key(kind, q));
    }
    std::sort(k.begin(), k.end());
    return k;
  }();
  return keys;
}

std::vector<std::string> validate_snapshot(const BackendSnapshot& b) {
  const auto& keys = canonical_gate_keys();
  for (const auto& [name, table] :
       {std::pair<const char*, const std::map<std::string, double>*>{"gate_error", &b.gate_error},
        {"gate_time_ns", &b.gate_time_ns}}) {
    for (const auto& key : keys) {
      if (!table->count(key)) {
        throw ValidationError(std::string(name) + " is missing key '" + key + "'");
      }
    }
    for (const auto& [key, value] : *table) {
      if (!std::count(keys.begin(), keys.end(), key)) {
        throw ValidationError(std::string(name) + " has unknown key '" + key + "'");
      }
      if (!std::isfinite(value) || value < 0.0) {
        throw ValidationError(std::string(name) + " value for '" + key + "' out of range");
      }
    }
  }
  for (const auto& [key, value] : b.gate_error) {
    if (value > 1.0) throw ValidationError("gate_error for '" + key + "' exceeds 1");
  }
  for (int q = 0; q < kNumQubits; ++q) {
    for (double r : b.readout[q]) {
      if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
        throw ValidationError("readout error on qubit " + std::to_string(q) + " out of range");
      }
    }
    if (b.t1_us[q] <= 0.0 || b.t2_us[q] <= 0.0) {
      throw ValidationError("t1/t2 on qubit " + std::to_string(q) + " must be positive");
    }
  }
  std::vector<std::string> warnings;
  for (int q = 0; q < kNumQubits; ++q) {
    if (b.t2_us[q] > 2.0 * b.t1_us[q]) {
      warnings.push_back("qubit " + std::to_string(q) + ": t2 exceeds 2*t1");
    }
  }
  return warnings;
}

std::array<double, kBackendParams> flatten_backend(const BackendSnapshot& b) {
  std::array<double, kBackendParams> out{};
  int i = 0;
  for (int q = 0; q < kNumQubits; ++q) out[i++] = b.freq_ghz[q];
  for (int q = 0; q < kNumQubits; ++q) out[i++] = b.t1_us[q];
  for (int q = 0; q < kNumQubits; ++q) out[i++] = b.t2_us[q];
  for (const auto& key : canonical_gate_keys()) out[i++] = b.gate_error.at(key);
  for (const auto& key : canonical_gate_keys()) out[i++] = b.gate_time_ns.at(key);
  for (int q = 0; q < kNumQubits; ++q) {
    out[i++] = b.readout[q][0];
    out[i++] = b.readout[q][1];
  }
  return out;
}

std::string snapshot_to_json(const BackendSnapshot& b) {
  json j;
  j["schema_version"] = 1;
  j["device"] = b.device;
  j["timestamp"] = b.timestamp;
  j["freq_ghz"] = b.freq_ghz;
  j["t1_us"] = b.t1_us;
  j["t2_us"] = b.t2_us;
  j["gate_error"] = b.gate_error;
  j["gate_time_ns"] = b.gate_time_ns;
  j["readout"] = b.readout;
  return j.dump(2);
}

BackendSnapshot snapshot_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("snapshot parse error: ") + e.what());
  }
  BackendSnapshot b;
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw ValidationError("unsupported snapshot schema_version");
    }
    b.device = j.at("device").get<std::string>();
    b.timestamp = j.value("timestamp", std::string{});
    b.freq_ghz = j.at("freq_ghz").get<std::array<double, kNumQubits>>();
    b.t1_us = j.at("t1_us").get<std::array<double, kNumQubits>>();
    b.t2_us = j.at("t2_us").get<std::array<double, kNumQubits>>();
    b.gate_error = j.at("gate_error").get<std::map<std::string, double>>();
    b.gate_time_ns = j.at("gate_time_ns").get<std::map<std::string, double>>();
    b.readout = j.at("readout").get<std::array<std::array<double, 2>, kNumQubits>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("snapshot field error: ") + e.what());
  }
  validate_snapshot(b);
  return b;
}

BackendSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open snapshot file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_json(ss.str());
}

void save_snapshot(const BackendSnapshot& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write snapshot file: " + path);
  out << snapshot_to_json(b) << "\n";
}

}  // namespace qem
