#include <CLI11.hpp>

#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qemlab/error.hpp"
#include "qemlab/experiment.hpp"

using namespace qem;

namespace {

void print_table(const ReportTable& t) {
  std::printf("%-28s %-32s %6s %4s %10s %10s %10s %10s %8s\n", "dataset", "method", "n", "exc",
              "median", "se", "p25", "p75", "improved");
  for (const auto& r : t.rows)
    std::printf("%-28s %-32s %6d %4d %10.4f %10.4f %10.4f %10.4f %7.1f%%\n", r.dataset.c_str(),
                r.method.c_str(), r.stats.n, r.stats.excluded, r.stats.median,
                r.stats.se_median, r.stats.p25, r.stats.p75, r.stats.pct_improved);
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ExperimentConfig config_or_default(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return load_experiment_config(path);
}

// generate: circuits + simulation in one pass, optionally synthesizing the
// calibration pool first
struct GenerateOpts {
  std::string config, out, pool_dir, pool_out, pool_config;
  int pool_size = 5;
  std::uint64_t seed = 0;
};

int run_generate(const GenerateOpts& o) {
  const ExperimentConfig cfg = config_or_default(o.config);
  std::vector<BackendSnapshot> pool;
  if (!o.pool_dir.empty()) {
    pool = load_pool(o.pool_dir);
  } else {
    SynthPoolConfig pc;
    if (!o.pool_config.empty()) pc = load_pool_config(o.pool_config);
    pool = gen_pool(pc, o.pool_size, mix_seed(o.seed, 7));
    if (!o.pool_out.empty()) save_pool(pool, o.pool_out);
  }
  const Dataset d = synthesize_dataset(cfg.generation, pool, o.seed);
  save_dataset(d, o.out);
  std::printf("wrote %zu records (%d circuits x %d repeats) to %s\n", d.records.size(),
              cfg.generation.n_circuits, cfg.generation.repeats, o.out.c_str());
  return 0;
}

struct SimulateOpts {
  std::string circuits, pool_dir, config, out;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateOpts& o) {
  const ExperimentConfig cfg = config_or_default(o.config);
  const auto circuits = load_circuits(o.circuits);
  const auto pool = load_pool(o.pool_dir);
  SimOptions opts;
  opts.noise = cfg.generation.noise;
  opts.shots = cfg.generation.shots;
  opts.repeats = cfg.generation.repeats;
  opts.exact_probabilities = cfg.generation.exact_probabilities;
  const Dataset d = build_dataset(circuits, pool, opts, o.seed);
  save_dataset(d, o.out);
  std::printf("wrote %zu records to %s\n", d.records.size(), o.out.c_str());
  return 0;
}

struct MitigateOpts {
  std::string data, method, config, out;
  double tau = -1.0;  // negative: search the grid on this dataset
};

int run_mitigate(const MitigateOpts& o) {
  const ExperimentConfig cfg = config_or_default(o.config);
  const Dataset d = load_dataset(o.data);
  double tau = o.tau;
  if (o.method == "threshold" && tau < 0.0) {
    const ThresholdSearch s = optimize_threshold(d, threshold_grid());
    tau = s.tau;
    std::printf("threshold search picked tau = %g\n", tau);
  }

  std::vector<int> idx(d.records.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  const std::string label = std::filesystem::path(o.data).stem().string();
  print_table(mitigate_records(d, idx, o.method, tau, cfg.repolarizer_t_mode, label, o.out));
  return 0;
}

struct TrainOpts {
  std::string config, out;
  std::int64_t seed = -1;
};

int run_train(const TrainOpts& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(o.seed)};
  print_table(run_experiment(cfg));
  return 0;
}

struct CkptOpts {
  std::string ckpt, data, config, out;
};

int run_finetune(const CkptOpts& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  const std::string data = !o.data.empty() ? o.data : cfg.finetune_dataset;
  if (data.empty())
    throw ValidationError("finetune: pass --data or set finetune_dataset in the config");
  const Dataset d = load_dataset(data);
  print_table(finetune_checkpoint(o.ckpt, d, cfg, o.out));
  return 0;
}

int run_evaluate(const CkptOpts& o, bool cross) {
  const ExperimentConfig cfg = config_or_default(o.config);
  const Dataset d = load_dataset(o.data);
  ReportTable t = cross_test(o.ckpt, d, cfg);
  if (!cross)
    for (auto& r : t.rows) r.method = "standard" + r.method.substr(r.method.find(':'));
  if (!o.out.empty()) write_report_json(t, o.out);
  print_table(t);
  return 0;
}

struct AblateOpts {
  std::string data, mode, out, ckpt, config;
  std::uint64_t seed = 0;
};

int run_ablate(const AblateOpts& o) {
  const Dataset d = load_dataset(o.data);
  Rng rng(mix_seed(o.seed, 97));
  const Dataset shuffled = randomize_inputs(d, parse_ablation(o.mode), rng);
  save_dataset(shuffled, o.out);
  std::printf("wrote %s-ablated dataset to %s\n", o.mode.c_str(), o.out.c_str());
  if (!o.ckpt.empty()) {
    const ExperimentConfig cfg = config_or_default(o.config);
    ReportTable t = cross_test(o.ckpt, shuffled, cfg);
    for (auto& r : t.rows) r.method = o.mode + r.method.substr(r.method.find(':'));
    print_table(t);
  }
  return 0;
}

struct TransferOpts {
  std::string config, pool_a, pool_b, out;
};

int run_transfer(const TransferOpts& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  print_table(transfer_study(load_pool(o.pool_a), load_pool(o.pool_b), cfg));
  return 0;
}

struct DepthOpts {
  std::string config, data, out;
  std::vector<int> depths;
};

int run_depth_split(const DepthOpts& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  print_table(depth_split_study(load_dataset(o.data), o.depths, cfg));
  return 0;
}

struct ReportOpts {
  std::string in, out;
};

int run_report(const ReportOpts& o) {
  const ReportTable t = report_table_from_json(slurp_file(o.in));
  std::filesystem::create_directories(o.out);
  const auto base = std::filesystem::path(o.out);
  write_report_csv(t, (base / "report.csv").string());
  write_report_svg(t, (base / "report.svg").string());
  print_table(t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("QEMLAB_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"quantum error mitigation lab"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* c_gen = app.add_subcommand("generate", "synthesize circuits and a simulated dataset");
  c_gen->add_option("--config", gen.config, "experiment config json (generation block)");
  c_gen->add_option("--out", gen.out, "dataset output path (jsonl)")->required();
  c_gen->add_option("--seed", gen.seed, "master seed");
  c_gen->add_option("--pool", gen.pool_dir, "existing calibration pool directory");
  c_gen->add_option("--pool-out", gen.pool_out, "where to save a synthesized pool");
  c_gen->add_option("--pool-size", gen.pool_size, "snapshots to synthesize")->check(CLI::PositiveNumber);
  c_gen->add_option("--pool-config", gen.pool_config, "pool parameter distribution json");

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate saved circuits against a pool");
  c_sim->add_option("--circuits", sim.circuits, "circuits file")->required();
  c_sim->add_option("--pool", sim.pool_dir, "calibration pool directory")->required();
  c_sim->add_option("--config", sim.config, "experiment config json (noise/shots/repeats)");
  c_sim->add_option("--out", sim.out, "dataset output path (jsonl)")->required();
  c_sim->add_option("--seed", sim.seed, "master seed");

  MitigateOpts mit;
  auto* c_mit = app.add_subcommand("mitigate", "apply a closed-form baseline to every record");
  c_mit->add_option("--data", mit.data, "dataset (jsonl)")->required();
  c_mit->add_option("--method", mit.method, "spam|repolarizer|mix|threshold")
      ->required()
      ->check(CLI::IsMember({"spam", "repolarizer", "mix", "threshold"}));
  c_mit->add_option("--tau", mit.tau, "threshold cut; negative searches the grid");
  c_mit->add_option("--config", mit.config, "experiment config json");
  c_mit->add_option("--out", mit.out, "per-record csv output path");

  TrainOpts trn;
  auto* c_trn = app.add_subcommand("train", "run the configured experiment");
  c_trn->add_option("--config", trn.config, "experiment config json")->required();
  c_trn->add_option("--out", trn.out, "artifact directory (overrides out_dir)");
  c_trn->add_option("--seed", trn.seed, "restrict the run to one seed");

  CkptOpts fin;
  auto* c_fin = app.add_subcommand("finetune", "fine-tune a checkpoint on a dataset");
  c_fin->add_option("--config", fin.config, "experiment config json")->required();
  c_fin->add_option("--ckpt", fin.ckpt, "checkpoint to resume")->required();
  c_fin->add_option("--data", fin.data, "dataset (defaults to finetune_dataset)");
  c_fin->add_option("--out", fin.out, "tuned checkpoint output path");

  CkptOpts eva;
  auto* c_eva = app.add_subcommand("evaluate", "score a checkpoint on a dataset's test split");
  c_eva->add_option("--ckpt", eva.ckpt, "checkpoint")->required();
  c_eva->add_option("--data", eva.data, "dataset (jsonl)")->required();
  c_eva->add_option("--config", eva.config, "experiment config json");
  c_eva->add_option("--out", eva.out, "summary json output path");

  AblateOpts abl;
  auto* c_abl = app.add_subcommand("ablate", "permute input fields across records");
  c_abl->add_option("--data", abl.data, "dataset (jsonl)")->required();
  c_abl->add_option("--mode", abl.mode,
                    "standard|random_backend|random_noisy|random_circuit|random_circuit_backend")
      ->required();
  c_abl->add_option("--out", abl.out, "ablated dataset output path")->required();
  c_abl->add_option("--seed", abl.seed, "permutation seed");
  c_abl->add_option("--ckpt", abl.ckpt, "checkpoint to score on the ablated data");
  c_abl->add_option("--config", abl.config, "experiment config json");

  CkptOpts crs;
  auto* c_crs = app.add_subcommand("cross-test", "score a checkpoint on a foreign dataset");
  c_crs->add_option("--ckpt", crs.ckpt, "checkpoint")->required();
  c_crs->add_option("--data", crs.data, "foreign dataset (jsonl)")->required();
  c_crs->add_option("--config", crs.config, "experiment config json");
  c_crs->add_option("--out", crs.out, "summary json output path");

  TransferOpts tra;
  auto* c_tra = app.add_subcommand("transfer", "pool-to-pool transfer comparison");
  c_tra->add_option("--config", tra.config, "experiment config json")->required();
  c_tra->add_option("--pool-a", tra.pool_a, "pre-training pool directory")->required();
  c_tra->add_option("--pool-b", tra.pool_b, "target pool directory")->required();
  c_tra->add_option("--out", tra.out, "artifact directory");

  DepthOpts dep;
  auto* c_dep = app.add_subcommand("depth-split", "train shallow, test deep");
  c_dep->add_option("--config", dep.config, "experiment config json")->required();
  c_dep->add_option("--data", dep.data, "dataset (jsonl)")->required();
  c_dep->add_option("--depths", dep.depths, "layer-count split points")->required();
  c_dep->add_option("--out", dep.out, "artifact directory");

  ReportOpts rep;
  auto* c_rep = app.add_subcommand("report", "render a summary json to csv and svg");
  c_rep->add_option("--in", rep.in, "summary json")->required();
  c_rep->add_option("--out", rep.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_gen->parsed()) return run_generate(gen);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_mit->parsed()) return run_mitigate(mit);
    if (c_trn->parsed()) return run_train(trn);
    if (c_fin->parsed()) return run_finetune(fin);
    if (c_eva->parsed()) return run_evaluate(eva, false);
    if (c_abl->parsed()) return run_ablate(abl);
    if (c_crs->parsed()) return run_evaluate(crs, true);
    if (c_tra->parsed()) return run_transfer(tra);
    if (c_dep->parsed()) return run_depth_split(dep);
    if (c_rep->parsed()) return run_report(rep);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
