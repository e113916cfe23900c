#include "qemlab/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qemlab/error.hpp"

namespace qem {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json spec_to_json(const LogNormalSpec& s) {
  return json{{"median", s.median}, {"sigma", s.sigma}};
}

LogNormalSpec spec_from_json(const json& j) {
  return {j.at("median").get<double>(), j.at("sigma").get<double>()};
}

}  // namespace

std::string pool_config_to_json(const SynthPoolConfig& c) {
  json j{{"schema_version", 1},
         {"device", c.device},
         {"freq_mean_ghz", c.freq_mean_ghz},
         {"freq_sd_ghz", c.freq_sd_ghz},
         {"t1_us", spec_to_json(c.t1_us)},
         {"t2_us", spec_to_json(c.t2_us)},
         {"err_1q", spec_to_json(c.err_1q)},
         {"err_cx", spec_to_json(c.err_cx)},
         {"err_readout", spec_to_json(c.err_readout)},
         {"time_1q_ns", c.time_1q_ns},
         {"time_cx_min_ns", c.time_cx_min_ns},
         {"time_cx_max_ns", c.time_cx_max_ns},
         {"time_measure_ns", c.time_measure_ns}};
  return j.dump(2);
}

SynthPoolConfig pool_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("pool config parse error: ") + e.what());
  }
  static const std::vector<std::string> known{
      "schema_version", "device",         "freq_mean_ghz",  "freq_sd_ghz",
      "t1_us",          "t2_us",          "err_1q",         "err_cx",
      "err_readout",    "time_1q_ns",     "time_cx_min_ns", "time_cx_max_ns",
      "time_measure_ns"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("pool config has unknown key '" + key + "'");
    }
  }
  if (j.value("schema_version", 0) != 1) {
    throw ValidationError("unsupported pool config schema_version");
  }
  SynthPoolConfig c;
  try {
    c.device = j.value("device", c.device);
    c.freq_mean_ghz = j.value("freq_mean_ghz", c.freq_mean_ghz);
    c.freq_sd_ghz = j.value("freq_sd_ghz", c.freq_sd_ghz);
    if (j.count("t1_us")) c.t1_us = spec_from_json(j["t1_us"]);
    if (j.count("t2_us")) c.t2_us = spec_from_json(j["t2_us"]);
    if (j.count("err_1q")) c.err_1q = spec_from_json(j["err_1q"]);
    if (j.count("err_cx")) c.err_cx = spec_from_json(j["err_cx"]);
    if (j.count("err_readout")) c.err_readout = spec_from_json(j["err_readout"]);
    c.time_1q_ns = j.value("time_1q_ns", c.time_1q_ns);
    c.time_cx_min_ns = j.value("time_cx_min_ns", c.time_cx_min_ns);
    c.time_cx_max_ns = j.value("time_cx_max_ns", c.time_cx_max_ns);
    c.time_measure_ns = j.value("time_measure_ns", c.time_measure_ns);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("pool config field error: ") + e.what());
  }
  return c;
}

SynthPoolConfig load_pool_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pool config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return pool_config_from_json(ss.str());
}

BackendSnapshot gen_snapshot(const SynthPoolConfig& cfg, Rng& rng,
                             const std::string& name) {
  BackendSnapshot b;
  b.device = name;
  b.timestamp = "synthetic";
  for (int q = 0; q < kNumQubits; ++q) {
    b.freq_ghz[q] = cfg.freq_mean_ghz + cfg.freq_sd_ghz * rng.normal();
  }
  for (int q = 0; q < kNumQubits; ++q) {
    b.t1_us[q] = rng.lognormal(cfg.t1_us.median, cfg.t1_us.sigma);
  }
  for (int q = 0; q < kNumQubits; ++q) {
    const double draw = rng.lognormal(cfg.t2_us.median, cfg.t2_us.sigma);
    b.t2_us[q] = std::min(draw, 2.0 * b.t1_us[q]);
  }
  for (int q = 0; q < kNumQubits; ++q) {
    const double p10 = std::min(rng.lognormal(cfg.err_readout.median, cfg.err_readout.sigma), 0.49);
    const double p01 = std::min(rng.lognormal(cfg.err_readout.median, cfg.err_readout.sigma), 0.49);
    b.readout[q] = {p10, p01};
  }
  for (int q = 0; q < kNumQubits; ++q) {
    const auto err1q = [&] {
      return std::min(rng.lognormal(cfg.err_1q.median, cfg.err_1q.sigma), 1.0);
    };
    b.gate_error[gate_key("x", q)] = err1q();
    b.gate_error[gate_key("sx", q)] = err1q();
    b.gate_error[gate_key("id", q)] = err1q();
    b.gate_error[gate_key("reset", q)] = err1q();
    b.gate_error[gate_key("rz", q)] = 0.0;
    b.gate_error[gate_key("measure", q)] = 0.5 * (b.readout[q][0] + b.readout[q][1]);
  }
  for (int q = 0; q + 1 < kNumQubits; ++q) {
    const double e = std::min(rng.lognormal(cfg.err_cx.median, cfg.err_cx.sigma), 1.0);
    b.gate_error[cx_key(q, q + 1)] = e;
    b.gate_error[cx_key(q + 1, q)] = e;
  }
  for (int q = 0; q < kNumQubits; ++q) {
    for (const char* kind : {"x", "sx", "id", "reset"}) {
      b.gate_time_ns[gate_key(kind, q)] = cfg.time_1q_ns;
    }
    b.gate_time_ns[gate_key("rz", q)] = 0.0;
    b.gate_time_ns[gate_key("measure", q)] = cfg.time_measure_ns;
  }
  for (int q = 0; q + 1 < kNumQubits; ++q) {
    const double t = rng.uniform(cfg.time_cx_min_ns, cfg.time_cx_max_ns);
    b.gate_time_ns[cx_key(q, q + 1)] = t;
    b.gate_time_ns[cx_key(q + 1, q)] = t;
  }
  validate_snapshot(b);
  return b;
}

std::vector<BackendSnapshot> gen_pool(const SynthPoolConfig& cfg, int count,
                                      std::uint64_t master_seed) {
  std::vector<BackendSnapshot> pool;
  pool.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(master_seed, i));
    pool.push_back(gen_snapshot(cfg, rng, cfg.device + "_" + std::to_string(i)));
  }
  return pool;
}

void save_pool(const std::vector<BackendSnapshot>& pool, const std::string& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.json", i);
    save_snapshot(pool[i], (fs::path(dir) / name).string());
  }
}

std::vector<BackendSnapshot> load_pool(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a pool directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("pool directory has no snapshots: " + dir);
  std::vector<BackendSnapshot> pool;
  for (const auto& f : files) pool.push_back(load_snapshot(f));
  return pool;
}

}  // namespace qem
