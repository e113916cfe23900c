#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qemlab/ablation.hpp"
#include "qemlab/baselines.hpp"
#include "qemlab/dataset.hpp"
#include "qemlab/metrics.hpp"
#include "qemlab/synth.hpp"
#include "qemlab/train.hpp"

namespace qem {

// max_layers = 0 means no upper bound
struct DepthFilter {
  int min_layers = 0;
  int max_layers = 0;
};

struct ModelSpec {
  std::vector<int> hidden = {512};
  Activation activation = Activation::Tanh;
  LossSpec loss;
  double lr = 1e-4;
  double weight_decay = 0.0;
  bool adamw = false;
  int batch_size = 128;
  int max_epochs = 2000;
  int finetune_epochs = -1;  // -1 follows max_epochs
  int early_stop_patience = 25;
  int plateau_patience = 10;
  double plateau_factor = 0.1;
  double min_lr = 1e-8;
};

// How studies synthesize datasets when they are not given one on disk.
struct GenerationSpec {
  std::string family = "pauli";  // or "random"
  int n_circuits = 100;
  int t_min = 3, t_max = 9;          // gadget counts, cycled over the range
  int steps_min = 14, steps_max = 28;  // random-family draw counts
  int shots = 20000;
  int repeats = 3;
  bool exact_probabilities = false;
  NoiseOptions noise;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string pretrain_dataset;  // path, required by run_experiment
  std::string finetune_dataset;  // optional second-stage data
  std::string test_dataset;      // optional held-out file; default is the test split
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::array<double, 3> split = {0.5, 0.125, 0.375};
  std::vector<std::string> methods = {"spam", "repolarizer", "mix", "threshold"};
  AblationMode ablation = AblationMode::Standard;
  DepthFilter depth;
  RepolarizerTMode repolarizer_t_mode = RepolarizerTMode::CxCount;
  ModelSpec model;
  GenerationSpec generation;
  std::string out_dir;  // empty: nothing is persisted
};

// Versioned JSON with every key checked; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

struct ReportRow {
  std::string dataset;
  std::string method;
  Summary stats;
};

struct ReportTable {
  std::vector<ReportRow> rows;
};

// Baseline methods get one row each (first seed's test split); trained
// models get one row per seed plus a median-seed row. With out_dir set,
// checkpoints, per-record CSVs, summary.json, report.csv and report.svg
// are written there.
ReportTable run_experiment(const ExperimentConfig& cfg);

// One closed-form method scored on the given records. tau only matters for
// "threshold". A per-record csv is written when csv_path is non-empty.
ReportTable mitigate_records(const Dataset& d, const std::vector<int>& indices,
                             const std::string& method, double tau, RepolarizerTMode t_mode,
                             const std::string& label, const std::string& csv_path);

// Evaluation-only run of a saved checkpoint against another dataset's test
// split. The checkpoint's own preprocessor is applied; a pad_depth mismatch
// is an error.
ReportTable cross_test(const std::string& checkpoint_path, const Dataset& foreign,
                       const ExperimentConfig& cfg);

// Resumes a saved checkpoint, fine-tunes it on the dataset's train/val split
// and scores the test split. The tuned model is written to out_ckpt when
// that is non-empty.
ReportTable finetune_checkpoint(const std::string& checkpoint_path, const Dataset& d,
                                const ExperimentConfig& cfg, const std::string& out_ckpt);

// Circuits cycled over the family's size range, simulated against snapshots
// drawn from the pool; one dataset per master seed.
Dataset synthesize_dataset(const GenerationSpec& g, const std::vector<BackendSnapshot>& pool,
                           std::uint64_t master_seed);

// Device-transfer analog on two calibration pools: pre-train on pool-A data,
// then compare (1) predicting directly, (2) fine-tuning on pool-B data,
// (3) fine-tuning on fresh pool-A data first and pool-B data second. All
// three evaluate on the same pool-B test split.
ReportTable transfer_study(const std::vector<BackendSnapshot>& pool_a,
                           const std::vector<BackendSnapshot>& pool_b,
                           const ExperimentConfig& cfg);

// Trains on circuits with n_layers <= d and tests on n_layers > d, one row
// per split depth; an empty side is an error naming the offending split.
ReportTable depth_split_study(const Dataset& d, const std::vector<int>& split_depths,
                              const ExperimentConfig& cfg);

std::string report_json(const ReportTable& t);
ReportTable report_table_from_json(const std::string& text);
void write_report_json(const ReportTable& t, const std::string& path);
void write_report_csv(const ReportTable& t, const std::string& path);
// Box-plot geometry only: median line, IQR box, P01/P99 whiskers per row.
void write_report_svg(const ReportTable& t, const std::string& path);

}  // namespace qem
