#include "qemlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>

#include "json.hpp"
#include "qemlab/circuit_gen.hpp"
#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"

namespace qem {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------- config io

const std::set<std::string>& known_methods() {
  static const std::set<std::string> m = {"spam",      "repolarizer",    "mix",
                                          "threshold", "mlp_prediction", "mlp_correction"};
  return m;
}

bool is_model_method(const std::string& m) {
  return m == "mlp_prediction" || m == "mlp_correction";
}

Head method_head(const std::string& m) {
  return m == "mlp_correction" ? Head::Correction : Head::Prediction;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : j.items())
    if (allowed.find(item.key()) == allowed.end())
      throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.name.empty()) throw ValidationError("config: name must not be empty");
  const double sum = cfg.split[0] + cfg.split[1] + cfg.split[2];
  if (cfg.split[0] <= 0.0 || cfg.split[1] <= 0.0 || cfg.split[2] <= 0.0 ||
      std::fabs(sum - 1.0) > 1e-9)
    throw ValidationError("config: split ratios must be positive and sum to 1");
  if (cfg.seeds.empty()) throw ValidationError("config: seeds must not be empty");
  std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
  if (uniq.size() != cfg.seeds.size()) throw ValidationError("config: seeds must be distinct");
  if (cfg.methods.empty()) throw ValidationError("config: methods must not be empty");
  for (const auto& m : cfg.methods)
    if (known_methods().find(m) == known_methods().end())
      throw ValidationError("config: unknown method '" + m + "'");
  if (cfg.depth.min_layers < 0 || cfg.depth.max_layers < 0 ||
      (cfg.depth.max_layers != 0 && cfg.depth.max_layers < cfg.depth.min_layers))
    throw ValidationError("config: bad depth filter");
  const auto& ms = cfg.model;
  if (ms.hidden.empty()) throw ValidationError("config: model.hidden must not be empty");
  for (int h : ms.hidden)
    if (h < 1) throw ValidationError("config: model.hidden entries must be positive");
  if (ms.lr < 0.0 || ms.batch_size < 1 || ms.max_epochs < 0 || ms.finetune_epochs < -1)
    throw ValidationError("config: bad model training knobs");
  const auto& g = cfg.generation;
  if (g.family != "pauli" && g.family != "random")
    throw ValidationError("config: generation.family must be 'pauli' or 'random'");
  if (g.n_circuits < 1 || g.t_min < 1 || g.t_max < g.t_min || g.steps_min < 1 ||
      g.steps_max < g.steps_min || g.shots < 1 || g.repeats < 1)
    throw ValidationError("config: bad generation block");
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "tanh") return Activation::Tanh;
  throw ValidationError("config: unknown activation '" + s + "'");
}

const char* activation_name(Activation a) { return a == Activation::ReLU ? "relu" : "tanh"; }

RepolarizerTMode parse_t_mode(const std::string& s) {
  if (s == "cx") return RepolarizerTMode::CxCount;
  if (s == "layers") return RepolarizerTMode::LayerCount;
  throw ValidationError("config: unknown repolarizer_t '" + s + "'");
}

const char* t_mode_name(RepolarizerTMode m) {
  return m == RepolarizerTMode::CxCount ? "cx" : "layers";
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  check_keys(j,
             {"schema_version", "name", "pretrain_dataset", "finetune_dataset", "test_dataset",
              "seeds", "split", "methods", "ablation", "depth_filter", "repolarizer_t", "model",
              "generation", "out_dir"},
             "config");
  if (j.value("schema_version", 0) != 1)
    throw ValidationError("config: schema_version must be 1");

  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    cfg.pretrain_dataset = j.value("pretrain_dataset", "");
    cfg.finetune_dataset = j.value("finetune_dataset", "");
    cfg.test_dataset = j.value("test_dataset", "");
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("split")) {
      const auto v = j["split"].get<std::vector<double>>();
      if (v.size() != 3) throw ValidationError("config: split needs exactly 3 ratios");
      cfg.split = {v[0], v[1], v[2]};
    }
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("ablation")) cfg.ablation = parse_ablation(j["ablation"].get<std::string>());
    if (j.contains("depth_filter")) {
      const auto& df = j["depth_filter"];
      check_keys(df, {"min_layers", "max_layers"}, "depth_filter");
      cfg.depth.min_layers = df.value("min_layers", 0);
      cfg.depth.max_layers = df.value("max_layers", 0);
    }
    if (j.contains("repolarizer_t"))
      cfg.repolarizer_t_mode = parse_t_mode(j["repolarizer_t"].get<std::string>());
    if (j.contains("model")) {
      const auto& m = j["model"];
      check_keys(m,
                 {"hidden", "activation", "loss", "lambda_l1", "entropy_beta", "lr",
                  "weight_decay", "adamw", "batch_size", "max_epochs", "finetune_epochs",
                  "early_stop_patience", "plateau_patience", "plateau_factor", "min_lr"},
                 "model");
      auto& ms = cfg.model;
      if (m.contains("hidden")) ms.hidden = m["hidden"].get<std::vector<int>>();
      if (m.contains("activation")) ms.activation = parse_activation(m["activation"].get<std::string>());
      if (m.contains("loss")) ms.loss.kind = parse_loss(m["loss"].get<std::string>());
      ms.loss.lambda_l1 = m.value("lambda_l1", ms.loss.lambda_l1);
      ms.loss.entropy_beta = m.value("entropy_beta", ms.loss.entropy_beta);
      ms.lr = m.value("lr", ms.lr);
      ms.weight_decay = m.value("weight_decay", ms.weight_decay);
      ms.adamw = m.value("adamw", ms.adamw);
      ms.batch_size = m.value("batch_size", ms.batch_size);
      ms.max_epochs = m.value("max_epochs", ms.max_epochs);
      ms.finetune_epochs = m.value("finetune_epochs", ms.finetune_epochs);
      ms.early_stop_patience = m.value("early_stop_patience", ms.early_stop_patience);
      ms.plateau_patience = m.value("plateau_patience", ms.plateau_patience);
      ms.plateau_factor = m.value("plateau_factor", ms.plateau_factor);
      ms.min_lr = m.value("min_lr", ms.min_lr);
    }
    if (j.contains("generation")) {
      const auto& g = j["generation"];
      check_keys(g,
                 {"family", "n_circuits", "t_min", "t_max", "steps_min", "steps_max", "shots",
                  "repeats", "exact_probabilities", "noise"},
                 "generation");
      auto& gs = cfg.generation;
      gs.family = g.value("family", gs.family);
      gs.n_circuits = g.value("n_circuits", gs.n_circuits);
      gs.t_min = g.value("t_min", gs.t_min);
      gs.t_max = g.value("t_max", gs.t_max);
      gs.steps_min = g.value("steps_min", gs.steps_min);
      gs.steps_max = g.value("steps_max", gs.steps_max);
      gs.shots = g.value("shots", gs.shots);
      gs.repeats = g.value("repeats", gs.repeats);
      gs.exact_probabilities = g.value("exact_probabilities", gs.exact_probabilities);
      if (g.contains("noise")) {
        const auto& nz = g["noise"];
        check_keys(nz, {"depolarizing", "relaxation", "readout", "global_depolarizing"}, "noise");
        gs.noise.depolarizing = nz.value("depolarizing", gs.noise.depolarizing);
        gs.noise.relaxation = nz.value("relaxation", gs.noise.relaxation);
        gs.noise.readout = nz.value("readout", gs.noise.readout);
        gs.noise.global_depolarizing =
            nz.value("global_depolarizing", gs.noise.global_depolarizing);
      }
    }
    cfg.out_dir = j.value("out_dir", "");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["name"] = cfg.name;
  j["pretrain_dataset"] = cfg.pretrain_dataset;
  j["finetune_dataset"] = cfg.finetune_dataset;
  j["test_dataset"] = cfg.test_dataset;
  j["seeds"] = cfg.seeds;
  j["split"] = {cfg.split[0], cfg.split[1], cfg.split[2]};
  j["methods"] = cfg.methods;
  j["ablation"] = ablation_name(cfg.ablation);
  j["depth_filter"] = {{"min_layers", cfg.depth.min_layers},
                       {"max_layers", cfg.depth.max_layers}};
  j["repolarizer_t"] = t_mode_name(cfg.repolarizer_t_mode);
  j["model"] = {{"hidden", cfg.model.hidden},
                {"activation", activation_name(cfg.model.activation)},
                {"loss", loss_name(cfg.model.loss.kind)},
                {"lambda_l1", cfg.model.loss.lambda_l1},
                {"entropy_beta", cfg.model.loss.entropy_beta},
                {"lr", cfg.model.lr},
                {"weight_decay", cfg.model.weight_decay},
                {"adamw", cfg.model.adamw},
                {"batch_size", cfg.model.batch_size},
                {"max_epochs", cfg.model.max_epochs},
                {"finetune_epochs", cfg.model.finetune_epochs},
                {"early_stop_patience", cfg.model.early_stop_patience},
                {"plateau_patience", cfg.model.plateau_patience},
                {"plateau_factor", cfg.model.plateau_factor},
                {"min_lr", cfg.model.min_lr}};
  j["generation"] = {{"family", cfg.generation.family},
                     {"n_circuits", cfg.generation.n_circuits},
                     {"t_min", cfg.generation.t_min},
                     {"t_max", cfg.generation.t_max},
                     {"steps_min", cfg.generation.steps_min},
                     {"steps_max", cfg.generation.steps_max},
                     {"shots", cfg.generation.shots},
                     {"repeats", cfg.generation.repeats},
                     {"exact_probabilities", cfg.generation.exact_probabilities},
                     {"noise",
                      {{"depolarizing", cfg.generation.noise.depolarizing},
                       {"relaxation", cfg.generation.noise.relaxation},
                       {"readout", cfg.generation.noise.readout},
                       {"global_depolarizing", cfg.generation.noise.global_depolarizing}}}};
  j["out_dir"] = cfg.out_dir;
  return j.dump();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return experiment_config_from_json(text);
}

// ------------------------------------------------------------ pipeline core

namespace {

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("stage '" + name + "': " + e.what());
  }
}

Dataset take_records(const Dataset& d, const std::vector<int>& idx) {
  Dataset out;
  out.family = d.family;
  out.pad_depth = d.pad_depth;
  out.shots = d.shots;
  out.records.reserve(idx.size());
  for (int i : idx) out.records.push_back(d.records[static_cast<std::size_t>(i)]);
  return out;
}

Dataset filter_depth(const Dataset& d, const DepthFilter& f) {
  if (f.min_layers == 0 && f.max_layers == 0) return d;
  std::vector<int> keep;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const int layers = d.records[i].meta.n_layers;
    if (layers >= f.min_layers && (f.max_layers == 0 || layers <= f.max_layers))
      keep.push_back(static_cast<int>(i));
  }
  if (keep.empty()) throw ValidationError("depth filter leaves no records");
  return take_records(d, keep);
}

// depth filter then input-field permutation; used for every dataset a run touches
Dataset prepare_dataset(const Dataset& d, const ExperimentConfig& cfg, std::uint64_t stream) {
  const Dataset filtered = filter_depth(d, cfg.depth);
  Rng rng(mix_seed(cfg.seeds.front(), stream));
  return randomize_inputs(filtered, cfg.ablation, rng);
}

struct EvalRows {
  std::vector<int> indices;             // into the evaluated dataset
  std::vector<std::optional<double>> l1rc;  // one per index
  std::vector<double> changes;          // defined values only
  int excluded = 0;
};

EvalRows record_metrics(const Dataset& d, const std::vector<int>& idx,
                        const std::vector<ProbDist>& mits) {
  EvalRows out;
  out.indices = idx;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& rec = d.records[static_cast<std::size_t>(idx[k])];
    const auto rc = l1_relative_change(rec.p_ideal, mits[k], rec.p_noisy);
    out.l1rc.push_back(rc);
    if (rc)
      out.changes.push_back(*rc);
    else
      ++out.excluded;
  }
  return out;
}

Summary summarize_rows(const EvalRows& rows) { return summarize(rows.changes, rows.excluded); }

void write_records_csv(const Dataset& d, const EvalRows& rows,
                       const std::vector<ProbDist>& mits, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "record,circuit_index,family,t,n_layers,repeat_index,signal_kl,noise_kl,"
         "l1_ideal_noisy,l1_ideal_mit,l1rc\n";
  for (std::size_t k = 0; k < rows.indices.size(); ++k) {
    const int i = rows.indices[k];
    const auto& rec = d.records[static_cast<std::size_t>(i)];
    out << i << ',' << rec.meta.circuit_index << ',' << csv_field(rec.meta.family) << ','
        << rec.meta.t << ',' << rec.meta.n_layers << ',' << rec.meta.repeat_index << ','
        << fmt_num(signal_kl(rec.p_ideal)) << ',' << fmt_num(noise_kl(rec.p_ideal, rec.p_noisy))
        << ',' << fmt_num(l1_distance(rec.p_ideal, rec.p_noisy)) << ','
        << fmt_num(l1_distance(rec.p_ideal, mits[k])) << ',';
    if (rows.l1rc[k]) out << fmt_num(*rows.l1rc[k]);
    out << '\n';
  }
}

std::vector<ProbDist> baseline_mitigate(const Dataset& d, const std::vector<int>& idx,
                                        const std::string& method, double tau,
                                        RepolarizerTMode mode) {
  std::vector<ProbDist> mits;
  mits.reserve(idx.size());
  for (int i : idx) {
    const auto& rec = d.records[static_cast<std::size_t>(i)];
    try {
      if (method == "spam") {
        mits.push_back(spam_mitigate(rec.p_noisy, rec.backend));
      } else if (method == "repolarizer") {
        const double e2q = effective_e2q(rec.encoded, rec.backend);
        mits.push_back(repolarize(rec.p_noisy, e2q, repolarizer_t(rec.encoded, mode)));
      } else if (method == "mix") {
        const double e2q = effective_e2q(rec.encoded, rec.backend);
        mits.push_back(mix_mitigate(rec.p_noisy, rec.backend, e2q, repolarizer_t(rec.encoded, mode)));
      } else if (method == "threshold") {
        mits.push_back(threshold_mitigate(rec.p_noisy, tau));
      } else {
        throw ValidationError("unknown baseline '" + method + "'");
      }
    } catch (const ValidationError& e) {
      throw ValidationError("stage 'mitigate:" + method + "' record " + std::to_string(i) +
                            ": " + e.what());
    }
  }
  return mits;
}

TrainConfig to_train_config(const ModelSpec& ms) {
  TrainConfig t;
  t.loss = ms.loss;
  t.lr = ms.lr;
  t.weight_decay = ms.weight_decay;
  t.adamw = ms.adamw;
  t.batch_size = ms.batch_size;
  t.max_epochs = ms.max_epochs;
  t.early_stop_patience = ms.early_stop_patience;
  t.plateau_patience = ms.plateau_patience;
  t.plateau_factor = ms.plateau_factor;
  t.min_lr = ms.min_lr;
  return t;
}

MlpConfig to_mlp_config(const ModelSpec& ms, Head head, int feature_dim) {
  MlpConfig m;
  m.layer_dims.push_back(head == Head::Prediction ? feature_dim + kDim : feature_dim);
  m.layer_dims.insert(m.layer_dims.end(), ms.hidden.begin(), ms.hidden.end());
  m.layer_dims.push_back(kDim);
  m.activation = ms.activation;
  m.head = head;
  return m;
}

struct SplitMatrices {
  MatrixData train, val;
};

SplitMatrices split_matrices(const Dataset& d, const SplitIndices& s, const Preprocessor& pp) {
  SplitMatrices out;
  out.train = dataset_matrices(d, s.train);
  out.val = dataset_matrices(d, s.val);
  out.train.x_cb = pp.transform(out.train.x_cb);
  out.val.x_cb = pp.transform(out.val.x_cb);
  return out;
}

struct TrainedModel {
  Mlp model;
  Preprocessor pp;
};

TrainedModel train_stage(const Dataset& pre, const SplitIndices& split, const ModelSpec& ms,
                         Head head, std::uint64_t seed) {
  MatrixData train = dataset_matrices(pre, split.train);
  MatrixData val = dataset_matrices(pre, split.val);
  Preprocessor pp;
  pp.fit(train.x_cb);
  train.x_cb = pp.transform(train.x_cb);
  val.x_cb = pp.transform(val.x_cb);

  TrainConfig tcfg = to_train_config(ms);
  tcfg.seed = seed;
  const MlpConfig mcfg = to_mlp_config(ms, head, static_cast<int>(train.x_cb.cols()));
  TrainResult res = train_mlp(mcfg, tcfg, train, val);
  return {std::move(res.model), std::move(pp)};
}

Mlp finetune_stage(const Mlp& model, const Preprocessor& pp, const Dataset& ft,
                   const SplitIndices& split, const ModelSpec& ms, std::uint64_t seed) {
  const SplitMatrices m = split_matrices(ft, split, pp);
  TrainConfig tcfg = to_train_config(ms);
  tcfg.seed = seed;
  if (ms.finetune_epochs >= 0) tcfg.max_epochs = ms.finetune_epochs;
  return fine_tune(model, tcfg, m.train, m.val).model;
}

std::vector<ProbDist> model_mitigate(const Mlp& model, const Preprocessor* pp, const Dataset& d,
                                     const std::vector<int>& idx) {
  MatrixData test = dataset_matrices(d, idx);
  if (pp) test.x_cb = pp->transform(test.x_cb);
  const Eigen::MatrixXd q = model.forward_eval(test.x_cb, test.p_noisy);
  std::vector<ProbDist> mits(idx.size());
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    for (int c = 0; c < kDim; ++c)
      mits[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = q(r, c);
  return mits;
}

// the seed whose median sits at the median of the per-seed medians
std::size_t median_seed_index(const std::vector<double>& medians) {
  const double target = percentile(medians, 50.0);
  std::size_t best = 0;
  double gap = std::fabs(medians[0] - target);
  for (std::size_t k = 1; k < medians.size(); ++k) {
    const double g = std::fabs(medians[k] - target);
    if (g < gap) {
      gap = g;
      best = k;
    }
  }
  return best;
}

struct Artifacts {
  fs::path dir;
  bool enabled = false;

  void init(const std::string& out_dir) {
    if (out_dir.empty()) return;
    dir = out_dir;
    fs::create_directories(dir);
    enabled = true;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string seed_label(const std::string& method, std::uint64_t seed) {
  return method + "[seed=" + std::to_string(seed) + "]";
}

}  // namespace

ReportTable run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.pretrain_dataset.empty())
    throw ValidationError("run_experiment: pretrain_dataset is required");

  Dataset pre = stage("load pretrain", [&] {
    return prepare_dataset(load_dataset(cfg.pretrain_dataset), cfg, 97);
  });
  std::optional<Dataset> ft;
  if (!cfg.finetune_dataset.empty())
    ft = stage("load finetune", [&] {
      return prepare_dataset(load_dataset(cfg.finetune_dataset), cfg, 98);
    });
  std::optional<Dataset> ext;
  if (!cfg.test_dataset.empty())
    ext = stage("load test", [&] {
      return prepare_dataset(load_dataset(cfg.test_dataset), cfg, 99);
    });

  // one feature layout across every dataset the run touches
  int pad = pre.pad_depth;
  if (ft) pad = std::max(pad, ft->pad_depth);
  if (ext) pad = std::max(pad, ext->pad_depth);
  if (pre.pad_depth != pad) pre = repad_dataset(pre, pad);
  if (ft && ft->pad_depth != pad) ft = repad_dataset(*ft, pad);
  if (ext && ext->pad_depth != pad) ext = repad_dataset(*ext, pad);

  // evaluation records: an explicit test file is used whole; otherwise the
  // test split of the last dataset in the flow
  const Dataset& eval_ds = ext ? *ext : (ft ? *ft : pre);
  const auto eval_indices = [&](std::uint64_t seed) -> std::vector<int> {
    if (ext) {
      std::vector<int> all(ext->records.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      return all;
    }
    return split_dataset(eval_ds, seed, cfg.split[0], cfg.split[1]).test;
  };

  Artifacts art;
  art.init(cfg.out_dir);
  const std::string config_hash = hex64(fnv1a(experiment_config_to_json(cfg)));

  ReportTable table;

  // threshold search calibrates on the pretrain train split of the first seed
  double tau = 0.0;
  const bool wants_threshold =
      std::count(cfg.methods.begin(), cfg.methods.end(), std::string("threshold")) > 0;
  if (wants_threshold) {
    const SplitIndices s0 = split_dataset(pre, cfg.seeds.front(), cfg.split[0], cfg.split[1]);
    tau = stage("threshold search", [&] {
      return optimize_threshold(take_records(pre, s0.train), threshold_grid()).tau;
    });
  }

  for (const auto& method : cfg.methods) {
    if (is_model_method(method)) continue;
    const auto idx = eval_indices(cfg.seeds.front());
    const auto mits = baseline_mitigate(eval_ds, idx, method, tau, cfg.repolarizer_t_mode);
    const EvalRows rows = record_metrics(eval_ds, idx, mits);
    table.rows.push_back({cfg.name, method, summarize_rows(rows)});
    if (art.enabled) write_records_csv(eval_ds, rows, mits, art.path("records_" + method + ".csv"));
  }

  for (const auto& method : cfg.methods) {
    if (!is_model_method(method)) continue;
    const Head head = method_head(method);
    std::vector<double> medians;
    std::vector<Summary> per_seed;
    for (const auto seed : cfg.seeds) {
      const TrainedModel tm = stage("train " + method + " seed " + std::to_string(seed), [&] {
        const SplitIndices split = split_dataset(pre, seed, cfg.split[0], cfg.split[1]);
        TrainedModel out = train_stage(pre, split, cfg.model, head, seed);
        if (ft) {
          const SplitIndices fsplit = split_dataset(*ft, seed, cfg.split[0], cfg.split[1]);
          out.model = finetune_stage(out.model, out.pp, *ft, fsplit, cfg.model, seed);
        }
        return out;
      });

      const auto idx = eval_indices(seed);
      const auto mits = model_mitigate(tm.model, &tm.pp, eval_ds, idx);
      const EvalRows rows = record_metrics(eval_ds, idx, mits);
      const Summary s = summarize_rows(rows);
      medians.push_back(s.median);
      per_seed.push_back(s);
      table.rows.push_back({cfg.name, seed_label(method, seed), s});

      if (art.enabled) {
        const std::string tag = method + "_seed" + std::to_string(seed);
        write_records_csv(eval_ds, rows, mits, art.path("records_" + tag + ".csv"));
        CheckpointExtra extra{tm.pp.to_json(), eval_ds.pad_depth, config_hash};
        save_checkpoint(tm.model, extra, art.path("ckpt_" + tag + ".json"));
      }
    }
    const std::size_t pick = median_seed_index(medians);
    table.rows.push_back({cfg.name, method, per_seed[pick]});
  }

  if (art.enabled) {
    write_report_json(table, art.path("summary.json"));
    write_report_csv(table, art.path("report.csv"));
    write_report_svg(table, art.path("report.svg"));
  }
  return table;
}

ReportTable mitigate_records(const Dataset& d, const std::vector<int>& indices,
                             const std::string& method, double tau, RepolarizerTMode t_mode,
                             const std::string& label, const std::string& csv_path) {
  if (is_model_method(method) || known_methods().find(method) == known_methods().end())
    throw ValidationError("mitigate_records: unknown baseline '" + method + "'");
  const auto mits = baseline_mitigate(d, indices, method, tau, t_mode);
  const EvalRows rows = record_metrics(d, indices, mits);
  if (!csv_path.empty()) write_records_csv(d, rows, mits, csv_path);
  ReportTable table;
  table.rows.push_back({label, method, summarize_rows(rows)});
  return table;
}

ReportTable cross_test(const std::string& checkpoint_path, const Dataset& foreign,
                       const ExperimentConfig& cfg) {
  validate_config(cfg);
  CheckpointExtra extra;
  const Mlp model = load_checkpoint(checkpoint_path, &extra);
  if (extra.pad_depth != foreign.pad_depth)
    throw ValidationError("cross_test: checkpoint pad_depth " + std::to_string(extra.pad_depth) +
                          " differs from dataset pad_depth " + std::to_string(foreign.pad_depth));
  std::optional<Preprocessor> pp;
  if (!extra.preprocessor_json.empty()) pp = Preprocessor::from_json(extra.preprocessor_json);

  const Dataset prepared = prepare_dataset(foreign, cfg, 99);
  const SplitIndices split =
      split_dataset(prepared, cfg.seeds.front(), cfg.split[0], cfg.split[1]);
  const auto mits = model_mitigate(model, pp ? &*pp : nullptr, prepared, split.test);
  const EvalRows rows = record_metrics(prepared, split.test, mits);

  ReportTable table;
  const char* head = model.config().head == Head::Correction ? "mlp_correction" : "mlp_prediction";
  table.rows.push_back({cfg.name, std::string("cross:") + head, summarize_rows(rows)});
  return table;
}

ReportTable finetune_checkpoint(const std::string& checkpoint_path, const Dataset& d,
                                const ExperimentConfig& cfg, const std::string& out_ckpt) {
  validate_config(cfg);
  CheckpointExtra extra;
  const Mlp model = load_checkpoint(checkpoint_path, &extra);
  if (extra.pad_depth != d.pad_depth)
    throw ValidationError("finetune_checkpoint: checkpoint pad_depth " +
                          std::to_string(extra.pad_depth) + " differs from dataset pad_depth " +
                          std::to_string(d.pad_depth));
  std::optional<Preprocessor> pp;
  if (!extra.preprocessor_json.empty()) pp = Preprocessor::from_json(extra.preprocessor_json);

  const Dataset prepared = prepare_dataset(d, cfg, 98);
  const SplitIndices split =
      split_dataset(prepared, cfg.seeds.front(), cfg.split[0], cfg.split[1]);
  MatrixData train = dataset_matrices(prepared, split.train);
  MatrixData val = dataset_matrices(prepared, split.val);
  if (pp) {
    train.x_cb = pp->transform(train.x_cb);
    val.x_cb = pp->transform(val.x_cb);
  }
  TrainConfig tcfg = to_train_config(cfg.model);
  tcfg.seed = cfg.seeds.front();
  if (cfg.model.finetune_epochs >= 0) tcfg.max_epochs = cfg.model.finetune_epochs;
  const Mlp tuned = stage("finetune checkpoint", [&] {
    return fine_tune(model, tcfg, train, val).model;
  });
  if (!out_ckpt.empty()) save_checkpoint(tuned, extra, out_ckpt);

  const auto mits = model_mitigate(tuned, pp ? &*pp : nullptr, prepared, split.test);
  const EvalRows rows = record_metrics(prepared, split.test, mits);
  ReportTable table;
  const char* head = model.config().head == Head::Correction ? "mlp_correction" : "mlp_prediction";
  table.rows.push_back({cfg.name, std::string("finetune:") + head, summarize_rows(rows)});
  return table;
}

Dataset synthesize_dataset(const GenerationSpec& g, const std::vector<BackendSnapshot>& pool,
                           std::uint64_t master_seed) {
  if (pool.empty()) throw ValidationError("synthesize_dataset: empty snapshot pool");
  std::vector<Circuit> circuits;
  circuits.reserve(static_cast<std::size_t>(g.n_circuits));
  for (int k = 0; k < g.n_circuits; ++k) {
    const auto seed = mix_seed(master_seed, static_cast<std::uint64_t>(k));
    if (g.family == "pauli") {
      const int t = g.t_min + k % (g.t_max - g.t_min + 1);
      circuits.push_back(gen_pauli_circuit(t, seed));
    } else {
      const int steps = g.steps_min + k % (g.steps_max - g.steps_min + 1);
      circuits.push_back(gen_random_circuit(steps, seed));
    }
  }
  SimOptions opts;
  opts.noise = g.noise;
  opts.shots = g.shots;
  opts.repeats = g.repeats;
  opts.exact_probabilities = g.exact_probabilities;
  return build_dataset(circuits, pool, opts, mix_seed(master_seed, 1000000007ULL));
}

ReportTable transfer_study(const std::vector<BackendSnapshot>& pool_a,
                           const std::vector<BackendSnapshot>& pool_b,
                           const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (pool_a.empty() || pool_b.empty())
    throw ValidationError("transfer_study: both calibration pools are required");
  std::string method;
  for (const auto& m : cfg.methods)
    if (is_model_method(m)) {
      method = m;
      break;
    }
  if (method.empty())
    throw ValidationError("transfer_study: methods must include an mlp model");
  const Head head = method_head(method);

  const auto s0 = cfg.seeds.front();
  Dataset a1 = stage("generate pool-A pretrain", [&] {
    return synthesize_dataset(cfg.generation, pool_a, mix_seed(s0, 11));
  });
  Dataset a2 = stage("generate pool-A finetune", [&] {
    return synthesize_dataset(cfg.generation, pool_a, mix_seed(s0, 12));
  });
  Dataset b = stage("generate pool-B", [&] {
    return synthesize_dataset(cfg.generation, pool_b, mix_seed(s0, 13));
  });
  const int pad = std::max({a1.pad_depth, a2.pad_depth, b.pad_depth});
  if (a1.pad_depth != pad) a1 = repad_dataset(a1, pad);
  if (a2.pad_depth != pad) a2 = repad_dataset(a2, pad);
  if (b.pad_depth != pad) b = repad_dataset(b, pad);

  const char* kConfigs[3] = {"only_predict", "fine_tuned", "transfer"};
  std::vector<std::vector<Summary>> per_seed(3);
  std::vector<std::vector<double>> medians(3);
  ReportTable table;

  for (const auto seed : cfg.seeds) {
    const SplitIndices sa1 = split_dataset(a1, seed, cfg.split[0], cfg.split[1]);
    const SplitIndices sa2 = split_dataset(a2, seed, cfg.split[0], cfg.split[1]);
    const SplitIndices sb = split_dataset(b, seed, cfg.split[0], cfg.split[1]);

    const TrainedModel base = stage("pretrain seed " + std::to_string(seed), [&] {
      return train_stage(a1, sa1, cfg.model, head, seed);
    });
    const Mlp tuned_a = stage("finetune-A seed " + std::to_string(seed), [&] {
      return finetune_stage(base.model, base.pp, a2, sa2, cfg.model, seed);
    });
    const Mlp tuned_b = stage("finetune-B seed " + std::to_string(seed), [&] {
      return finetune_stage(base.model, base.pp, b, sb, cfg.model, seed);
    });
    const Mlp tuned_ab = stage("finetune-AB seed " + std::to_string(seed), [&] {
      return finetune_stage(tuned_a, base.pp, b, sb, cfg.model, seed);
    });

    const Mlp* models[3] = {&tuned_a, &tuned_b, &tuned_ab};
    for (int c = 0; c < 3; ++c) {
      const auto mits = model_mitigate(*models[c], &base.pp, b, sb.test);
      const Summary s = summarize_rows(record_metrics(b, sb.test, mits));
      per_seed[static_cast<std::size_t>(c)].push_back(s);
      medians[static_cast<std::size_t>(c)].push_back(s.median);
      table.rows.push_back({cfg.name, seed_label(kConfigs[c], seed), s});
    }
  }
  for (int c = 0; c < 3; ++c) {
    const std::size_t pick = median_seed_index(medians[static_cast<std::size_t>(c)]);
    table.rows.push_back({cfg.name, kConfigs[c], per_seed[static_cast<std::size_t>(c)][pick]});
  }

  Artifacts art;
  art.init(cfg.out_dir);
  if (art.enabled) {
    write_report_json(table, art.path("summary.json"));
    write_report_csv(table, art.path("report.csv"));
    write_report_svg(table, art.path("report.svg"));
  }
  return table;
}

ReportTable depth_split_study(const Dataset& d, const std::vector<int>& split_depths,
                              const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (split_depths.empty()) throw ValidationError("depth_split_study: no split depths");
  std::string method;
  for (const auto& m : cfg.methods)
    if (is_model_method(m)) {
      method = m;
      break;
    }
  if (method.empty())
    throw ValidationError("depth_split_study: methods must include an mlp model");
  const Head head = method_head(method);

  ReportTable table;
  for (const int depth : split_depths) {
    std::vector<int> shallow, deep;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      if (d.records[i].meta.n_layers <= depth)
        shallow.push_back(static_cast<int>(i));
      else
        deep.push_back(static_cast<int>(i));
    }
    if (shallow.empty())
      throw ValidationError("depth_split_study: no records with n_layers <= " +
                            std::to_string(depth) + " to train on");
    if (deep.empty())
      throw ValidationError("depth_split_study: no records with n_layers > " +
                            std::to_string(depth) + " to test on");

    const Dataset train_side = take_records(d, shallow);
    std::vector<Summary> per_seed;
    std::vector<double> medians;
    for (const auto seed : cfg.seeds) {
      const TrainedModel tm =
          stage("train d<=" + std::to_string(depth) + " seed " + std::to_string(seed), [&] {
            const SplitIndices split =
                split_dataset(train_side, seed, cfg.split[0], cfg.split[1]);
            return train_stage(train_side, split, cfg.model, head, seed);
          });
      const auto mits = model_mitigate(tm.model, &tm.pp, d, deep);
      const Summary s = summarize_rows(record_metrics(d, deep, mits));
      per_seed.push_back(s);
      medians.push_back(s.median);
    }
    const std::size_t pick = median_seed_index(medians);
    table.rows.push_back(
        {cfg.name + " d<=" + std::to_string(depth), method, per_seed[pick]});
  }

  Artifacts art;
  art.init(cfg.out_dir);
  if (art.enabled) {
    write_report_json(table, art.path("summary.json"));
    write_report_csv(table, art.path("report.csv"));
    write_report_svg(table, art.path("report.svg"));
  }
  return table;
}

// ------------------------------------------------------------------ reports

std::string report_json(const ReportTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"dataset", r.dataset},
                    {"method", r.method},
                    {"n", r.stats.n},
                    {"excluded", r.stats.excluded},
                    {"median", r.stats.median},
                    {"se_median", r.stats.se_median},
                    {"p01", r.stats.p01},
                    {"p25", r.stats.p25},
                    {"p75", r.stats.p75},
                    {"p99", r.stats.p99},
                    {"pct_improved", r.stats.pct_improved}});
  }
  json j;
  j["schema_version"] = 1;
  j["rows"] = std::move(rows);
  return j.dump();
}

ReportTable report_table_from_json(const std::string& text) {
  ReportTable t;
  try {
    const json j = json::parse(text);
    if (j.value("schema_version", 0) != 1)
      throw ValidationError("report: schema_version must be 1");
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.dataset = r.at("dataset").get<std::string>();
      row.method = r.at("method").get<std::string>();
      row.stats.n = r.at("n").get<int>();
      row.stats.excluded = r.at("excluded").get<int>();
      row.stats.median = r.at("median").get<double>();
      row.stats.se_median = r.at("se_median").get<double>();
      row.stats.p01 = r.at("p01").get<double>();
      row.stats.p25 = r.at("p25").get<double>();
      row.stats.p75 = r.at("p75").get<double>();
      row.stats.p99 = r.at("p99").get<double>();
      row.stats.pct_improved = r.at("pct_improved").get<double>();
      t.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
  return t;
}

void write_report_json(const ReportTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << report_json(t) << '\n';
}

void write_report_csv(const ReportTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "dataset,method,n,excluded,median,se_median,p25,p75,pct_improved\n";
  for (const auto& r : t.rows) {
    out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << r.stats.n << ','
        << r.stats.excluded << ',' << fmt_num(r.stats.median) << ','
        << fmt_num(r.stats.se_median) << ',' << fmt_num(r.stats.p25) << ','
        << fmt_num(r.stats.p75) << ',' << fmt_num(r.stats.pct_improved) << '\n';
  }
}

void write_report_svg(const ReportTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");

  const int label_w = 280;
  const int plot_w = 460;
  const int row_h = 26;
  const int top = 30;
  const int height = top + row_h * static_cast<int>(t.rows.size()) + 10;

  double lo = -1.0, hi = 1.0;
  if (!t.rows.empty()) {
    lo = t.rows[0].stats.p01;
    hi = t.rows[0].stats.p99;
    for (const auto& r : t.rows) {
      lo = std::min(lo, r.stats.p01);
      hi = std::max(hi, r.stats.p99);
    }
    const double pad = (hi - lo) > 0 ? 0.05 * (hi - lo) : 0.5;
    lo -= pad;
    hi += pad;
  }
  const auto sx = [&](double v) {
    return static_cast<double>(label_w) + (v - lo) / (hi - lo) * static_cast<double>(plot_w);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + plot_w + 20
      << "\" height=\"" << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  if (lo < 0.0 && hi > 0.0)
    out << "<line x1=\"" << fmt_num(sx(0.0)) << "\" y1=\"" << top - 12 << "\" x2=\""
        << fmt_num(sx(0.0)) << "\" y2=\"" << height - 6
        << "\" stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const double cy = top + row_h * static_cast<double>(i) + row_h / 2.0;
    const double by0 = cy - 7, by1 = cy + 7;
    out << "<text x=\"6\" y=\"" << fmt_num(cy + 4) << "\">" << r.dataset << " / " << r.method
        << "</text>\n";
    out << "<line x1=\"" << fmt_num(sx(r.stats.p01)) << "\" y1=\"" << fmt_num(cy) << "\" x2=\""
        << fmt_num(sx(r.stats.p99)) << "\" y2=\"" << fmt_num(cy) << "\" stroke=\"#444\"/>\n";
    out << "<rect x=\"" << fmt_num(sx(r.stats.p25)) << "\" y=\"" << fmt_num(by0) << "\" width=\""
        << fmt_num(std::max(0.0, sx(r.stats.p75) - sx(r.stats.p25))) << "\" height=\""
        << fmt_num(by1 - by0) << "\" fill=\"#8ab\" stroke=\"#345\"/>\n";
    out << "<line x1=\"" << fmt_num(sx(r.stats.median)) << "\" y1=\"" << fmt_num(by0)
        << "\" x2=\"" << fmt_num(sx(r.stats.median)) << "\" y2=\"" << fmt_num(by1)
        << "\" stroke=\"#a22\" stroke-width=\"2\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace qem
