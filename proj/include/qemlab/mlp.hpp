#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qemlab/losses.hpp"

namespace qem {

enum class Activation { ReLU, Tanh };
enum class Head { Prediction, Correction };

struct MlpConfig {
  // [input, hidden..., 32]; the input already includes p_noisy's 32 entries
  // for the Prediction head.
  std::vector<int> layer_dims;
  Activation activation = Activation::Tanh;
  Head head = Head::Prediction;
};

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

struct BatchNorm {
  Eigen::VectorXd gamma, beta, run_mean, run_var;
};

// Everything backward needs to differentiate one train-mode pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;   // per dense layer, rows = samples
  std::vector<Eigen::MatrixXd> bn_xhat;  // per hidden layer
  std::vector<Eigen::VectorXd> bn_mean, bn_var;
  std::vector<Eigen::MatrixXd> activated;  // post-activation per hidden layer
  Eigen::MatrixXd p_noisy;
  Eigen::MatrixXd q;  // model output distributions
};

struct Gradients {
  std::vector<DenseLayer> layers;  // same shapes, holding dL/d(param)
  std::vector<Eigen::VectorXd> bn_gamma, bn_beta;
};

// Dense net with batch norm and a distribution-valued head. Prediction maps
// [x_CB; p_noisy] through softmax; Correction maps x_CB to a mask c and
// outputs softmax(c .* p_noisy), which is not the identity at c = 1.
class Mlp {
 public:
  Mlp(MlpConfig cfg, std::uint64_t seed);

  // Rows are samples. Train mode normalizes with batch statistics and
  // updates the running ones; eval mode reads the running statistics.
  Eigen::MatrixXd forward_eval(const Eigen::MatrixXd& x_cb,
                               const Eigen::MatrixXd& p_noisy) const;
  ForwardCache forward_train(const Eigen::MatrixXd& x_cb, const Eigen::MatrixXd& p_noisy);

  // Gradients of the batch-mean loss from the cached train-mode pass.
  Gradients backward(const ForwardCache& cache, const Eigen::MatrixXd& p_target,
                     const LossSpec& spec) const;

  const MlpConfig& config() const { return cfg_; }
  int input_dim() const { return cfg_.layer_dims.front(); }
  int n_hidden() const { return static_cast<int>(cfg_.layer_dims.size()) - 2; }

  std::vector<DenseLayer> layers;  // n_hidden + 1 entries
  std::vector<BatchNorm> bn;       // one per hidden layer
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;

 private:
  Eigen::MatrixXd assemble_input(const Eigen::MatrixXd& x_cb,
                                 const Eigen::MatrixXd& p_noisy) const;
  MlpConfig cfg_;
};

double batch_loss(const Eigen::MatrixXd& q, const Eigen::MatrixXd& p_target,
                  const LossSpec& spec);

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z);

void save_mlp_json(const Mlp& m, const std::string& path);

struct CheckpointExtra {
  std::string preprocessor_json;  // empty when absent
  int pad_depth = 0;
  std::string config_hash;
};

void save_checkpoint(const Mlp& m, const CheckpointExtra& extra, const std::string& path);
Mlp load_checkpoint(const std::string& path, CheckpointExtra* extra = nullptr);

}  // namespace qem
