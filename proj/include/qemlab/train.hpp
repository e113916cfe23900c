#pragma once

#include <cstdint>
#include <vector>

#include "qemlab/dataset.hpp"
#include "qemlab/mlp.hpp"
#include "qemlab/preprocess.hpp"

namespace qem {

struct SplitIndices {
  std::vector<int> train, val, test;
};

// 50 / 12.5 / 37.5 record split with all repeats of one circuit
// (meta.circuit_index) kept in the same split, assigned by a seeded shuffle
// of the circuit groups. Throws if any split comes out empty.
SplitIndices split_dataset(const Dataset& d, std::uint64_t seed);
SplitIndices split_dataset(const Dataset& d, std::uint64_t seed, double train_frac,
                           double val_frac);

struct MatrixData {
  Eigen::MatrixXd x_cb;     // one flattened circuit+backend row per record
  Eigen::MatrixXd p_noisy;  // n x 32
  Eigen::MatrixXd p_ideal;  // n x 32
};

MatrixData dataset_matrices(const Dataset& d, const std::vector<int>& indices);

struct TrainConfig {
  LossSpec loss;
  double lr = 1e-4;
  double weight_decay = 0.0;
  bool adamw = false;  // decoupled decay; plain Adam adds wd to the gradient
  int batch_size = 128;
  int max_epochs = 2000;
  int early_stop_patience = 25;
  int plateau_patience = 10;
  double plateau_factor = 0.1;
  double min_lr = 1e-8;
  std::uint64_t seed = 0;  // weight init and epoch shuffles
};

struct TrainResult {
  Mlp model;
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;
  int best_epoch = -1;  // epoch index of the returned parameters
  double best_val = 0.0;
  double final_lr = 0.0;
};

// Minimizes the batch-mean loss on train with Adam/AdamW, monitors val with
// a reduce-on-plateau schedule, stops after early_stop_patience epochs
// without val improvement, returns the best-val parameters.
TrainResult train_mlp(const MlpConfig& mcfg, const TrainConfig& tcfg, const MatrixData& train,
                      const MatrixData& val);

// The same loop at a tenth of the learning rate with fresh optimizer
// moments, starting from the given parameters.
TrainResult fine_tune(const Mlp& pretrained, const TrainConfig& tcfg, const MatrixData& train,
                      const MatrixData& val);

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult result;
};

std::vector<SeedRun> train_seeds(const MlpConfig& mcfg, const TrainConfig& tcfg,
                                 const MatrixData& train, const MatrixData& val,
                                 const std::vector<std::uint64_t>& seeds);

}  // namespace qem
