#include "qemlab/hpo.hpp"

#include <cmath>

#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"

namespace qem {

HpoResult search_hyperparams(const HpoSpace& space, int budget, Head head, int input_dim,
                             const TrainConfig& base, const MatrixData& train,
                             const MatrixData& val, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("search_hyperparams: budget must be at least 1");
  if (space.hidden_options.empty() || space.batch_options.empty() ||
      space.activation_options.empty() || space.adamw_options.empty())
    throw ValidationError("search_hyperparams: empty choice list");

  Rng rng(seed);
  HpoResult result;
  for (int trial = 0; trial < budget; ++trial) {
    HpoTrial t;
    t.train = base;
    t.train.lr = std::pow(10.0, rng.uniform(space.log10_lr[0], space.log10_lr[1]));
    t.train.weight_decay = std::pow(10.0, rng.uniform(space.log10_wd[0], space.log10_wd[1]));
    const auto& hidden = space.hidden_options[rng.below(space.hidden_options.size())];
    t.train.batch_size = space.batch_options[rng.below(space.batch_options.size())];
    t.train.adamw = space.adamw_options[rng.below(space.adamw_options.size())];
    t.train.max_epochs = std::min(base.max_epochs, 50);
    t.train.early_stop_patience = 10;
    t.train.seed = mix_seed(seed, static_cast<std::uint64_t>(trial) + 1);

    t.mlp.layer_dims.clear();
    t.mlp.layer_dims.push_back(input_dim);
    t.mlp.layer_dims.insert(t.mlp.layer_dims.end(), hidden.begin(), hidden.end());
    t.mlp.layer_dims.push_back(kDim);
    t.mlp.activation = space.activation_options[rng.below(space.activation_options.size())];
    t.mlp.head = head;

    const TrainResult run = train_mlp(t.mlp, t.train, train, val);
    t.val_loss = run.best_val;
    result.trial_losses.push_back(t.val_loss);
    if (result.best_trial < 0 || t.val_loss < result.best.val_loss) {
      result.best = t;
      result.best_trial = trial;
    }
  }
  return result;
}

}  // namespace qem
