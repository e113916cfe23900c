#pragma once

#include "qemlab/train.hpp"

namespace qem {

// Random-search space mirroring the tuned knobs: learning rate, layer
// widths, batch size, weight decay, activation, optimizer.
struct HpoSpace {
  std::array<double, 2> log10_lr = {-5.0, -2.0};  // log-uniform
  std::array<double, 2> log10_wd = {-6.0, -2.0};
  std::vector<std::vector<int>> hidden_options = {{256}, {512}, {256, 256}, {512, 512}};
  std::vector<int> batch_options = {32, 64, 128};
  std::vector<Activation> activation_options = {Activation::ReLU, Activation::Tanh};
  std::vector<bool> adamw_options = {false};
};

struct HpoTrial {
  MlpConfig mlp;
  TrainConfig train;
  double val_loss = 0.0;
};

struct HpoResult {
  HpoTrial best;
  int best_trial = -1;
  std::vector<double> trial_losses;
};

// Evaluates `budget` sampled configurations with short training runs
// (capped epochs, tighter early stopping) and returns the argmin validation
// loss; ties keep the earlier trial. Deterministic given the seed.
HpoResult search_hyperparams(const HpoSpace& space, int budget, Head head, int input_dim,
                             const TrainConfig& base, const MatrixData& train,
                             const MatrixData& val, std::uint64_t seed);

}  // namespace qem
