#include "qemlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"

namespace qem {

SplitIndices split_dataset(const Dataset& d, std::uint64_t seed) {
  return split_dataset(d, seed, 0.5, 0.125);
}

SplitIndices split_dataset(const Dataset& d, std::uint64_t seed, double train_frac,
                           double val_frac) {
  const auto n = d.records.size();
  if (n == 0) throw ValidationError("split_dataset: empty dataset");
  if (train_frac <= 0.0 || val_frac <= 0.0 || train_frac + val_frac >= 1.0)
    throw ValidationError("split_dataset: fractions must be positive and leave a test share");

  std::map<int, std::vector<int>> by_circuit;
  for (std::size_t i = 0; i < n; ++i)
    by_circuit[d.records[i].meta.circuit_index].push_back(static_cast<int>(i));

  std::vector<std::vector<int>> groups;
  groups.reserve(by_circuit.size());
  for (auto& [idx, members] : by_circuit) groups.push_back(std::move(members));

  Rng rng(seed);
  for (std::size_t i = groups.size(); i > 1; --i)
    std::swap(groups[i - 1], groups[rng.below(i)]);

  const auto target_train =
      static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(n)));
  const auto target_val =
      static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(n)));

  SplitIndices out;
  for (const auto& g : groups) {
    auto& dest = out.train.size() < target_train ? out.train
                 : out.val.size() < target_val   ? out.val
                                                 : out.test;
    dest.insert(dest.end(), g.begin(), g.end());
  }
  if (out.train.empty() || out.val.empty() || out.test.empty())
    throw ValidationError("split_dataset: a split came out empty; dataset too small");
  return out;
}

MatrixData dataset_matrices(const Dataset& d, const std::vector<int>& indices) {
  if (indices.empty()) throw ValidationError("dataset_matrices: no records selected");
  MatrixData out;
  const auto first = flatten_inputs(d.records[static_cast<std::size_t>(indices[0])].encoded,
                                    d.records[static_cast<std::size_t>(indices[0])].backend);
  const auto dim = static_cast<Eigen::Index>(first.size());
  const auto rows = static_cast<Eigen::Index>(indices.size());
  out.x_cb.resize(rows, dim);
  out.p_noisy.resize(rows, kDim);
  out.p_ideal.resize(rows, kDim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& rec = d.records[static_cast<std::size_t>(indices[static_cast<std::size_t>(r)])];
    const auto flat = r == 0 ? first : flatten_inputs(rec.encoded, rec.backend);
    if (static_cast<Eigen::Index>(flat.size()) != dim)
      throw ValidationError("dataset_matrices: records have mixed pad_depth");
    for (Eigen::Index c = 0; c < dim; ++c) out.x_cb(r, c) = flat[static_cast<std::size_t>(c)];
    for (int c = 0; c < kDim; ++c) {
      out.p_noisy(r, c) = rec.p_noisy.p[static_cast<std::size_t>(c)];
      out.p_ideal(r, c) = rec.p_ideal.p[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct AdamSlot {
  Eigen::MatrixXd m, v;
};

struct AdamState {
  std::vector<AdamSlot> slots;
  int t = 0;
};

void adam_step(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, AdamSlot& slot,
               int t, const TrainConfig& cfg, double lr) {
  Eigen::MatrixXd g = grad;
  if (!cfg.adamw && cfg.weight_decay != 0.0) g += cfg.weight_decay * param;
  slot.m = kBeta1 * slot.m + (1.0 - kBeta1) * g;
  slot.v = kBeta2 * slot.v.array().matrix() + (1.0 - kBeta2) * g.array().square().matrix();
  const double c1 = 1.0 - std::pow(kBeta1, t);
  const double c2 = 1.0 - std::pow(kBeta2, t);
  param.array() -=
      lr * (slot.m.array() / c1) / ((slot.v.array() / c2).sqrt() + kAdamEps);
  if (cfg.adamw && cfg.weight_decay != 0.0) param.array() -= lr * cfg.weight_decay * param.array();
}

// parameter tensors in a fixed order: per layer W, b, then per BN gamma, beta
std::vector<AdamSlot> make_slots(const Mlp& m) {
  std::vector<AdamSlot> slots;
  for (const auto& layer : m.layers) {
    slots.push_back({Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()),
                     Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols())});
    slots.push_back({Eigen::MatrixXd::Zero(layer.b.size(), 1), Eigen::MatrixXd::Zero(layer.b.size(), 1)});
  }
  for (const auto& norm : m.bn) {
    slots.push_back({Eigen::MatrixXd::Zero(norm.gamma.size(), 1),
                     Eigen::MatrixXd::Zero(norm.gamma.size(), 1)});
    slots.push_back({Eigen::MatrixXd::Zero(norm.beta.size(), 1),
                     Eigen::MatrixXd::Zero(norm.beta.size(), 1)});
  }
  return slots;
}

void optimizer_update(Mlp& model, const Gradients& grads, AdamState& state,
                      const TrainConfig& cfg, double lr) {
  ++state.t;
  std::size_t s = 0;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    adam_step(model.layers[k].W, grads.layers[k].W, state.slots[s++], state.t, cfg, lr);
    adam_step(model.layers[k].b, grads.layers[k].b, state.slots[s++], state.t, cfg, lr);
  }
  for (std::size_t k = 0; k < model.bn.size(); ++k) {
    adam_step(model.bn[k].gamma, grads.bn_gamma[k], state.slots[s++], state.t, cfg, lr);
    adam_step(model.bn[k].beta, grads.bn_beta[k], state.slots[s++], state.t, cfg, lr);
  }
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& order,
                          std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i)
    out.row(static_cast<Eigen::Index>(i - begin)) = m.row(order[i]);
  return out;
}

TrainResult run_training(Mlp model, const TrainConfig& tcfg, const MatrixData& train,
                         const MatrixData& val) {
  const auto n = train.x_cb.rows();
  if (n == 0 || val.x_cb.rows() == 0) throw ValidationError("train: empty split");
  if (n < 2 && model.n_hidden() > 0)
    throw ValidationError("train: batch statistics need at least 2 training records");
  if (tcfg.batch_size < 1) throw ValidationError("train: batch_size must be positive");

  Rng shuffle_rng(mix_seed(tcfg.seed, 1));

  TrainResult result{model, {}, {}, -1, 0.0, tcfg.lr};
  // epoch -1 baseline: fine-tuning for zero epochs must return the model as is
  result.best_val = batch_loss(model.forward_eval(val.x_cb, val.p_noisy), val.p_ideal, tcfg.loss);

  AdamState adam{make_slots(model), 0};
  double lr = tcfg.lr;
  double sched_best = result.best_val;
  int sched_bad = 0;
  int since_best = 0;

  std::vector<int> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0;
    std::size_t trained = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(tcfg.batch_size));
      if (end - begin < 2 && model.n_hidden() > 0) continue;  // undersized trailing batch
      const Eigen::MatrixXd bx = take_rows(train.x_cb, order, begin, end);
      const Eigen::MatrixXd bn_ = take_rows(train.p_noisy, order, begin, end);
      const Eigen::MatrixXd bi = take_rows(train.p_ideal, order, begin, end);

      ForwardCache cache = model.forward_train(bx, bn_);
      loss_sum += batch_loss(cache.q, bi, tcfg.loss) * static_cast<double>(end - begin);
      trained += end - begin;
      const Gradients grads = model.backward(cache, bi, tcfg.loss);
      optimizer_update(model, grads, adam, tcfg, lr);
    }
    result.train_loss.push_back(trained > 0 ? loss_sum / static_cast<double>(trained) : 0.0);

    const double vloss =
        batch_loss(model.forward_eval(val.x_cb, val.p_noisy), val.p_ideal, tcfg.loss);
    result.val_loss.push_back(vloss);

    if (vloss < result.best_val) {
      result.best_val = vloss;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= tcfg.early_stop_patience) {
      break;
    }

    if (vloss < sched_best) {
      sched_best = vloss;
      sched_bad = 0;
    } else if (++sched_bad > tcfg.plateau_patience) {
      lr = std::max(lr * tcfg.plateau_factor, tcfg.min_lr);
      sched_bad = 0;
    }
  }

  result.final_lr = lr;
  return result;
}

}  // namespace

TrainResult train_mlp(const MlpConfig& mcfg, const TrainConfig& tcfg, const MatrixData& train,
                      const MatrixData& val) {
  return run_training(Mlp(mcfg, mix_seed(tcfg.seed, 0)), tcfg, train, val);
}

TrainResult fine_tune(const Mlp& pretrained, const TrainConfig& tcfg, const MatrixData& train,
                      const MatrixData& val) {
  TrainConfig ft = tcfg;
  ft.lr = tcfg.lr / 10.0;
  return run_training(pretrained, ft, train, val);
}

std::vector<SeedRun> train_seeds(const MlpConfig& mcfg, const TrainConfig& tcfg,
                                 const MatrixData& train, const MatrixData& val,
                                 const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ValidationError("train_seeds: no seeds");
  std::vector<SeedRun> runs;
  runs.reserve(seeds.size());
  for (const auto s : seeds) {
    TrainConfig cfg = tcfg;
    cfg.seed = s;
    runs.push_back({s, train_mlp(mcfg, cfg, train, val)});
  }
  return runs;
}

}  // namespace qem
