#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qemlab/encoding.hpp"
#include "qemlab/noise.hpp"

namespace qem {

struct RecordMeta {
  std::string family;
  int t = 0;
  int n_layers = 0;
  int repeat_index = 0;
  int shots = 0;
  std::uint64_t circuit_seed = 0;
  int circuit_index = 0;  // groups repeats of one circuit inside a dataset
};

struct DatasetRecord {
  EncodedCircuit encoded;
  BackendSnapshot backend;
  ProbDist p_ideal;
  ProbDist p_noisy;
  RecordMeta meta;
};

struct Dataset {
  std::string family;
  int pad_depth = 0;
  int shots = 0;
  std::vector<DatasetRecord> records;
};

// JSONL: one header object, then one record object per line. Numbers are
// written with shortest round-trip formatting, so save/load is bit-exact.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

void save_circuits(const std::vector<Circuit>& cs, const std::string& path);
std::vector<Circuit> load_circuits(const std::string& path);

struct SimOptions {
  NoiseOptions noise;
  int shots = 20000;
  int repeats = 3;
  // Skip finite-shot sampling and store exact noisy probabilities.
  bool exact_probabilities = false;
};

// Simulates every circuit `repeats` times, each repeat against a snapshot
// drawn from the pool on its own derived stream, with finite-shot noisy
// frequencies. pad_depth is the largest layer count in the batch.
Dataset build_dataset(const std::vector<Circuit>& circuits,
                      const std::vector<BackendSnapshot>& pool,
                      const SimOptions& opts, std::uint64_t master_seed);

// Padding is an all-zero tail, so datasets built separately can be brought
// onto one feature layout by raising pad_depth. Going below a record's real
// layer count is an error.
Dataset repad_dataset(const Dataset& d, int pad_depth);

}  // namespace qem
