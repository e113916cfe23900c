#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "qemlab/circuit_gen.hpp"
#include "qemlab/dataset.hpp"
#include "qemlab/error.hpp"
#include "qemlab/metrics.hpp"
#include "qemlab/rng.hpp"
#include "qemlab/synth.hpp"
#include "qemlab/train.hpp"

using namespace qem;

namespace {

Dataset grouped_dataset(int n_circuits, int repeats, std::uint64_t seed) {
  std::vector<Circuit> cs;
  for (int k = 0; k < n_circuits; ++k)
    cs.push_back(gen_pauli_circuit(2, seed + static_cast<std::uint64_t>(k)));
  SimOptions opts;
  opts.shots = 64;
  opts.repeats = repeats;
  opts.exact_probabilities = true;
  return build_dataset(cs, gen_pool(SynthPoolConfig{}, 2, 4242), opts, seed);
}

// Learnable toy regime: p_noisy is p_ideal rotated by `shift` outcomes and
// mixed with the uniform; the features carry no signal.
MatrixData toy_regime(Rng& rng, int n, int x_dim, double keep, int shift) {
  MatrixData d;
  d.x_cb.resize(n, x_dim);
  d.p_noisy.resize(n, kDim);
  d.p_ideal.resize(n, kDim);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < x_dim; ++c) d.x_cb(r, c) = rng.u01();
    double tot = 0.0;
    for (int c = 0; c < kDim; ++c) {
      d.p_ideal(r, c) = rng.u01();
      tot += d.p_ideal(r, c);
    }
    d.p_ideal.row(r) /= tot;
    for (int c = 0; c < kDim; ++c)
      d.p_noisy(r, c) = keep * d.p_ideal(r, (c + shift) % kDim) + (1.0 - keep) / kDim;
  }
  return d;
}

bool same_params(const Mlp& a, const Mlp& b) {
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    if ((a.layers[k].W - b.layers[k].W).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.layers[k].b - b.layers[k].b).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  for (std::size_t k = 0; k < a.bn.size(); ++k) {
    if ((a.bn[k].gamma - b.bn[k].gamma).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.bn[k].beta - b.bn[k].beta).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.bn[k].run_mean - b.bn[k].run_mean).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.bn[k].run_var - b.bn[k].run_var).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

TrainConfig quick_config(std::uint64_t seed) {
  TrainConfig t;
  t.lr = 3e-3;
  t.batch_size = 32;
  t.max_epochs = 5;
  t.seed = seed;
  return t;
}

}  // namespace

TEST_CASE("split keeps circuit repeats together at the target fractions") {
  const Dataset d = grouped_dataset(16, 3, 50);
  REQUIRE(d.records.size() == 48);
  const SplitIndices s = split_dataset(d, 9);

  CHECK(s.train.size() == 24);
  CHECK(s.val.size() == 6);
  CHECK(s.test.size() == 18);

  std::set<int> seen;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (int i : *part) seen.insert(i);
  CHECK(seen.size() == 48);

  // every repeat of a circuit lands in the same split
  std::vector<int> home(16, -1);
  int part_id = 0;
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    for (int i : *part) {
      const int circuit = d.records[static_cast<std::size_t>(i)].meta.circuit_index;
      if (home[static_cast<std::size_t>(circuit)] < 0)
        home[static_cast<std::size_t>(circuit)] = part_id;
      CHECK(home[static_cast<std::size_t>(circuit)] == part_id);
    }
    ++part_id;
  }

  const SplitIndices again = split_dataset(d, 9);
  CHECK(again.train == s.train);
  CHECK(again.val == s.val);
  CHECK(again.test == s.test);
  const SplitIndices other = split_dataset(d, 10);
  CHECK(other.train != s.train);
}

TEST_CASE("split refuses a dataset that cannot fill every part") {
  const Dataset d = grouped_dataset(1, 3, 51);
  CHECK_THROWS_AS(split_dataset(d, 0), ValidationError);
}

TEST_CASE("dataset_matrices flattens records in index order") {
  const Dataset d = grouped_dataset(3, 2, 52);
  const std::vector<int> idx = {4, 0, 2};
  const MatrixData m = dataset_matrices(d, idx);
  CHECK(m.x_cb.rows() == 3);
  CHECK(m.x_cb.cols() == d.pad_depth * 25 + 101);

  const auto& rec = d.records[4];
  const auto flat = flatten_inputs(rec.encoded, rec.backend);
  for (Eigen::Index c = 0; c < m.x_cb.cols(); ++c)
    CHECK(m.x_cb(0, c) == flat[static_cast<std::size_t>(c)]);
  for (int c = 0; c < kDim; ++c) {
    CHECK(m.p_noisy(0, c) == rec.p_noisy[static_cast<std::size_t>(c)]);
    CHECK(m.p_ideal(0, c) == rec.p_ideal[static_cast<std::size_t>(c)]);
  }

  CHECK_THROWS_AS(dataset_matrices(d, {}), ValidationError);
}

TEST_CASE("a zero learning rate leaves the parameters untouched") {
  Rng rng(7001);
  const MatrixData train = toy_regime(rng, 12, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 6, 2, 0.8, 0);
  TrainConfig tcfg = quick_config(77);
  tcfg.lr = 0.0;
  tcfg.min_lr = 0.0;
  tcfg.max_epochs = 3;

  // without batch norm the eval output is a pure function of the weights
  MlpConfig flat;
  flat.layer_dims = {2 + kDim, kDim};
  const TrainResult r = train_mlp(flat, tcfg, train, val);
  const Mlp init(flat, mix_seed(tcfg.seed, 0));
  CHECK((r.model.layers[0].W - init.layers[0].W).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.model.layers[0].b - init.layers[0].b).cwiseAbs().maxCoeff() == 0.0);
  // constant val curve: no strict improvement, so the baseline model is kept
  CHECK(r.best_epoch == -1);
  CHECK(r.val_loss.size() == 3);
  CHECK(r.val_loss[1] == r.val_loss[0]);
  CHECK(r.val_loss[2] == r.val_loss[0]);
  CHECK(r.final_lr == 0.0);

  // with batch norm the weights still stay put, but the running statistics
  // keep tracking the batches, so the eval curve is free to drift
  MlpConfig deep;
  deep.layer_dims = {2 + kDim, 6, kDim};
  const TrainResult rd = train_mlp(deep, tcfg, train, val);
  const Mlp dinit(deep, mix_seed(tcfg.seed, 0));
  for (std::size_t k = 0; k < dinit.layers.size(); ++k) {
    CHECK((rd.model.layers[k].W - dinit.layers[k].W).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rd.model.layers[k].b - dinit.layers[k].b).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((rd.model.bn[0].gamma - dinit.bn[0].gamma).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rd.model.bn[0].beta - dinit.bn[0].beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rd.model.bn[0].run_mean - dinit.bn[0].run_mean).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("training is a pure function of its config") {
  Rng rng(7002);
  const MatrixData train = toy_regime(rng, 24, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 8, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 8, kDim};

  const TrainResult a = train_mlp(mcfg, quick_config(5), train, val);
  const TrainResult b = train_mlp(mcfg, quick_config(5), train, val);
  CHECK(same_params(a.model, b.model));
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.val_loss == b.val_loss);
  CHECK(a.best_epoch == b.best_epoch);

  const TrainResult c = train_mlp(mcfg, quick_config(6), train, val);
  CHECK(!same_params(a.model, c.model));
}

TEST_CASE("early stopping halts within patience of the best epoch") {
  Rng rng(7003);
  const MatrixData train = toy_regime(rng, 32, 2, 0.75, 0);
  const MatrixData val = toy_regime(rng, 12, 2, 0.75, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 8, kDim};
  TrainConfig tcfg = quick_config(11);
  tcfg.max_epochs = 400;
  tcfg.early_stop_patience = 4;

  const TrainResult r = train_mlp(mcfg, tcfg, train, val);
  const int last_epoch = static_cast<int>(r.val_loss.size()) - 1;
  CHECK(last_epoch <= r.best_epoch + tcfg.early_stop_patience);
  if (r.best_epoch >= 0) {
    CHECK(r.best_val == *std::min_element(r.val_loss.begin(), r.val_loss.end()));
    CHECK(r.best_val == r.val_loss[static_cast<std::size_t>(r.best_epoch)]);
  }
}

TEST_CASE("stalled validation drives the learning rate to its floor") {
  Rng rng(7004);
  const MatrixData train = toy_regime(rng, 12, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 6, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, kDim};  // no batch norm, so nothing at all moves
  TrainConfig tcfg = quick_config(13);
  tcfg.lr = 0.0;  // validation never improves
  tcfg.max_epochs = 12;
  tcfg.plateau_patience = 2;
  tcfg.early_stop_patience = 50;

  const TrainResult r = train_mlp(mcfg, tcfg, train, val);
  CHECK(r.final_lr == tcfg.min_lr);
}

TEST_CASE("an undersized trailing batch is skipped when batch norm is present") {
  Rng rng(7005);
  const MatrixData train = toy_regime(rng, 9, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 4, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 6, kDim};
  TrainConfig tcfg = quick_config(17);
  tcfg.batch_size = 8;  // splits 9 rows into 8 + 1; the singleton must be dropped
  tcfg.max_epochs = 2;
  CHECK_NOTHROW(train_mlp(mcfg, tcfg, train, val));
}

TEST_CASE("training learns to invert a fixed noisy mixing") {
  Rng rng(7006);
  const MatrixData train = toy_regime(rng, 320, 2, 0.6, 3);
  const MatrixData val = toy_regime(rng, 80, 2, 0.6, 3);
  const MatrixData test = toy_regime(rng, 60, 2, 0.6, 3);

  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 32, kDim};
  TrainConfig tcfg;
  tcfg.lr = 3e-3;
  tcfg.batch_size = 32;
  tcfg.max_epochs = 120;
  tcfg.early_stop_patience = 120;
  tcfg.seed = 21;

  const TrainResult r = train_mlp(mcfg, tcfg, train, val);
  REQUIRE(r.best_epoch >= 0);
  CHECK(r.best_val < r.val_loss.front());

  std::vector<double> changes;
  const Eigen::MatrixXd q = r.model.forward_eval(test.x_cb, test.p_noisy);
  for (int row = 0; row < 60; ++row) {
    ProbDist ideal, noisy, mit;
    for (int c = 0; c < kDim; ++c) {
      ideal[static_cast<std::size_t>(c)] = test.p_ideal(row, c);
      noisy[static_cast<std::size_t>(c)] = test.p_noisy(row, c);
      mit[static_cast<std::size_t>(c)] = q(row, c);
    }
    const auto rc = l1_relative_change(ideal, mit, noisy);
    REQUIRE(rc.has_value());
    changes.push_back(*rc);
  }
  CHECK(percentile(changes, 50.0) < 0.0);
}

TEST_CASE("fine tuning for zero epochs returns the model as is") {
  Rng rng(7007);
  const MatrixData train = toy_regime(rng, 24, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 8, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 8, kDim};
  const TrainResult pre = train_mlp(mcfg, quick_config(23), train, val);

  TrainConfig ft = quick_config(23);
  ft.max_epochs = 0;
  const TrainResult r = fine_tune(pre.model, ft, train, val);
  CHECK(same_params(r.model, pre.model));
  CHECK(r.best_epoch == -1);
  CHECK(r.train_loss.empty());
  CHECK(r.final_lr == ft.lr / 10.0);
}

TEST_CASE("fine tuning adapts a pretrained model to a shifted regime") {
  Rng rng(7008);
  const MatrixData train_a = toy_regime(rng, 200, 2, 0.7, 0);
  const MatrixData val_a = toy_regime(rng, 50, 2, 0.7, 0);
  const MatrixData train_b = toy_regime(rng, 200, 2, 0.55, 1);
  const MatrixData val_b = toy_regime(rng, 50, 2, 0.55, 1);

  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 24, kDim};
  TrainConfig tcfg;
  tcfg.lr = 3e-3;
  tcfg.batch_size = 32;
  tcfg.max_epochs = 40;
  tcfg.early_stop_patience = 40;
  tcfg.seed = 29;

  const TrainResult pre = train_mlp(mcfg, tcfg, train_a, val_a);
  const double before = batch_loss(pre.model.forward_eval(val_b.x_cb, val_b.p_noisy),
                                   val_b.p_ideal, tcfg.loss);

  TrainConfig ft = tcfg;
  ft.max_epochs = 25;
  const TrainResult tuned = fine_tune(pre.model, ft, train_b, val_b);
  CHECK(tuned.best_epoch >= 0);
  CHECK(tuned.best_val < before);
  CHECK(tuned.final_lr <= tcfg.lr / 10.0);
}

TEST_CASE("seed sweeps reproduce the single-seed runs") {
  Rng rng(7009);
  const MatrixData train = toy_regime(rng, 24, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 8, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 8, kDim};
  const TrainConfig tcfg = quick_config(0);

  const auto runs = train_seeds(mcfg, tcfg, train, val, {3, 4, 5});
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].seed == 3);
  CHECK(runs[2].seed == 5);
  CHECK(!same_params(runs[0].result.model, runs[1].result.model));

  TrainConfig solo = tcfg;
  solo.seed = 4;
  const TrainResult alone = train_mlp(mcfg, solo, train, val);
  CHECK(same_params(alone.model, runs[1].result.model));
  CHECK(alone.val_loss == runs[1].result.val_loss);

  CHECK_THROWS_AS(train_seeds(mcfg, tcfg, train, val, {}), ValidationError);
}

TEST_CASE("weight decay styles are distinct but agree at zero") {
  Rng rng(7010);
  const MatrixData train = toy_regime(rng, 24, 2, 0.8, 0);
  const MatrixData val = toy_regime(rng, 8, 2, 0.8, 0);
  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 8, kDim};

  TrainConfig adam = quick_config(31);
  adam.weight_decay = 0.01;
  TrainConfig adamw = adam;
  adamw.adamw = true;
  const TrainResult ra = train_mlp(mcfg, adam, train, val);
  const TrainResult rw = train_mlp(mcfg, adamw, train, val);
  CHECK(!same_params(ra.model, rw.model));

  TrainConfig plain = quick_config(31);
  TrainConfig plainw = plain;
  plainw.adamw = true;
  const TrainResult pa = train_mlp(mcfg, plain, train, val);
  const TrainResult pw = train_mlp(mcfg, plainw, train, val);
  CHECK(same_params(pa.model, pw.model));
}

TEST_CASE("degenerate training inputs are rejected") {
  Rng rng(7011);
  const MatrixData ok = toy_regime(rng, 8, 2, 0.8, 0);
  MatrixData empty;
  empty.x_cb.resize(0, 2 + kDim);
  empty.p_noisy.resize(0, kDim);
  empty.p_ideal.resize(0, kDim);

  MlpConfig mcfg;
  mcfg.layer_dims = {2 + kDim, 6, kDim};
  CHECK_THROWS_AS(train_mlp(mcfg, quick_config(1), empty, ok), ValidationError);
  CHECK_THROWS_AS(train_mlp(mcfg, quick_config(1), ok, empty), ValidationError);

  TrainConfig bad = quick_config(1);
  bad.batch_size = 0;
  CHECK_THROWS_AS(train_mlp(mcfg, bad, ok, ok), ValidationError);

  const MatrixData one = toy_regime(rng, 1, 2, 0.8, 0);
  CHECK_THROWS_AS(train_mlp(mcfg, quick_config(1), one, ok), ValidationError);
}
