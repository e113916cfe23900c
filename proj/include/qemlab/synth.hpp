#pragma once

#include <string>
#include <vector>

#include "qemlab/backend.hpp"
#include "qemlab/rng.hpp"

namespace qem {

struct LogNormalSpec {
  double median = 0.0;
  double sigma = 0.0;
};

// Distribution parameters for synthetic calibration snapshots. The shipped
// defaults sit in configs/pool_default.json; everything here is data, so a
// "different device" is just a different config file.
struct SynthPoolConfig {
  std::string device = "synthetic";
  double freq_mean_ghz = 5.0;
  double freq_sd_ghz = 0.25;
  LogNormalSpec t1_us{100.0, 0.35};
  LogNormalSpec t2_us{90.0, 0.45};  // clamped to <= 2*t1 per qubit
  LogNormalSpec err_1q{3e-4, 0.5};
  LogNormalSpec err_cx{1.1e-2, 0.4};
  LogNormalSpec err_readout{1.5e-2, 0.5};
  double time_1q_ns = 35.0;
  double time_cx_min_ns = 250.0;
  double time_cx_max_ns = 500.0;
  double time_measure_ns = 700.0;
};

std::string pool_config_to_json(const SynthPoolConfig& c);
SynthPoolConfig pool_config_from_json(const std::string& text);
SynthPoolConfig load_pool_config(const std::string& path);

// One snapshot. Rz is virtual (zero error, zero duration); both directions
// of an edge share the drawn CX error; measure gate error is the mean of the
// qubit's readout pair.
BackendSnapshot gen_snapshot(const SynthPoolConfig& cfg, Rng& rng,
                             const std::string& name);

std::vector<BackendSnapshot> gen_pool(const SynthPoolConfig& cfg, int count,
                                      std::uint64_t master_seed);

// A pool on disk is a directory of snapshot JSON files, read in name order.
void save_pool(const std::vector<BackendSnapshot>& pool, const std::string& dir);
std::vector<BackendSnapshot> load_pool(const std::string& dir);

}  // namespace qem
