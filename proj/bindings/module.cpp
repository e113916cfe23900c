// Python bindings for the core operations: circuit generation, the two
// simulators, the analytic mitigators, metrics, datasets, and the experiment
// runner. Distributions cross the boundary as plain 32-element sequences.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qemlab/ablation.hpp"
#include "qemlab/baselines.hpp"
#include "qemlab/circuit_gen.hpp"
#include "qemlab/dataset.hpp"
#include "qemlab/error.hpp"
#include "qemlab/experiment.hpp"
#include "qemlab/metrics.hpp"
#include "qemlab/noise.hpp"
#include "qemlab/statevector.hpp"
#include "qemlab/synth.hpp"
#include "qemlab/train.hpp"

namespace py = pybind11;
using namespace qem;

namespace {

using Probs = std::array<double, kDim>;

ProbDist to_dist(const Probs& p) {
  ProbDist d;
  d.p = p;
  return d;
}

NoiseOptions noise_options(bool depolarizing, bool relaxation, bool readout,
                           bool global_depolarizing) {
  NoiseOptions o;
  o.depolarizing = depolarizing;
  o.relaxation = relaxation;
  o.readout = readout;
  o.global_depolarizing = global_depolarizing;
  return o;
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["n"] = s.n;
  d["excluded"] = s.excluded;
  d["median"] = s.median;
  d["se_median"] = s.se_median;
  d["p01"] = s.p01;
  d["p25"] = s.p25;
  d["p75"] = s.p75;
  d["p99"] = s.p99;
  d["pct_improved"] = s.pct_improved;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum error mitigation core: simulators, mitigators, datasets";
  m.attr("__version__") = "0.1.0";
  m.attr("NUM_QUBITS") = kNumQubits;
  m.attr("DIM") = kDim;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("family", [](const Circuit& c) { return c.meta.family; })
      .def_property_readonly("t", [](const Circuit& c) { return c.meta.t; })
      .def_property_readonly("seed", [](const Circuit& c) { return c.meta.seed; })
      .def_property_readonly("n_ops", [](const Circuit& c) { return c.ops.size(); })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit family=" + c.meta.family + " t=" + std::to_string(c.meta.t) +
               " ops=" + std::to_string(c.ops.size()) + ">";
      });

  py::class_<BackendSnapshot>(m, "BackendSnapshot")
      .def_property_readonly("device", [](const BackendSnapshot& b) { return b.device; })
      .def("__repr__",
           [](const BackendSnapshot& b) { return "<BackendSnapshot device=" + b.device + ">"; });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("family", [](const Dataset& d) { return d.family; })
      .def_property_readonly("pad_depth", [](const Dataset& d) { return d.pad_depth; })
      .def_property_readonly("shots", [](const Dataset& d) { return d.shots; })
      .def("__len__", [](const Dataset& d) { return d.records.size(); })
      .def("record",
           [](const Dataset& d, std::size_t i) {
             if (i >= d.records.size()) throw py::index_error();
             const auto& r = d.records[i];
             py::dict out;
             out["p_ideal"] = r.p_ideal.p;
             out["p_noisy"] = r.p_noisy.p;
             out["family"] = r.meta.family;
             out["t"] = r.meta.t;
             out["n_layers"] = r.meta.n_layers;
             out["repeat_index"] = r.meta.repeat_index;
             out["circuit_index"] = r.meta.circuit_index;
             return out;
           })
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset family=" + d.family + " records=" + std::to_string(d.records.size()) +
               " pad_depth=" + std::to_string(d.pad_depth) + ">";
      });

  // circuits
  m.def("compile_gadget",
        [](const std::string& pauli, double alpha) {
          Circuit c;
          c.ops = compile_gadget(parse_pauli(pauli), alpha);
          c.meta = {"gadget", 1, 0};
          return c;
        },
        py::arg("pauli"), py::arg("alpha"));
  m.def("gen_pauli_circuit", &gen_pauli_circuit, py::arg("t_gadgets"), py::arg("seed"));
  m.def("gen_random_circuit", &gen_random_circuit, py::arg("t_steps"), py::arg("seed"));

  // simulators
  m.def("ideal_distribution",
        [](const Circuit& c) { return ideal_distribution(c).p; }, py::arg("circuit"));
  m.def("noisy_distribution",
        [](const Circuit& c, const BackendSnapshot& b, bool depolarizing, bool relaxation,
           bool readout, bool global_depolarizing) {
          const NoiseModel nm = build_noise_model(
              b, noise_options(depolarizing, relaxation, readout, global_depolarizing));
          return noisy_distribution(c, nm).p;
        },
        py::arg("circuit"), py::arg("backend"), py::arg("depolarizing") = true,
        py::arg("relaxation") = false, py::arg("readout") = true,
        py::arg("global_depolarizing") = false);
  m.def("apply_confusion",
        [](const Probs& p, const BackendSnapshot& b) {
          return apply_confusion(build_noise_model(b, NoiseOptions{}), to_dist(p)).p;
        },
        py::arg("p"), py::arg("backend"));

  // mitigators
  m.def("spam_mitigate",
        [](const Probs& p, const BackendSnapshot& b) { return spam_mitigate(to_dist(p), b).p; },
        py::arg("p"), py::arg("backend"));
  m.def("repolarize",
        [](const Probs& p, double lam, int t) { return repolarize(to_dist(p), lam, t).p; },
        py::arg("p"), py::arg("lambda_"), py::arg("t"));
  m.def("mix_mitigate",
        [](const Probs& p, const BackendSnapshot& b, double lam, int t) {
          return mix_mitigate(to_dist(p), b, lam, t).p;
        },
        py::arg("p"), py::arg("backend"), py::arg("lambda_"), py::arg("t"));
  m.def("threshold_mitigate",
        [](const Probs& p, double tau) { return threshold_mitigate(to_dist(p), tau).p; },
        py::arg("p"), py::arg("tau"));
  m.def("threshold_grid", &threshold_grid, py::arg("n") = 30, py::arg("lo") = 0.0,
        py::arg("hi") = 0.5);
  m.def("optimize_threshold",
        [](const Dataset& d, const std::vector<double>& grid) {
          const ThresholdSearch s = optimize_threshold(d, grid);
          py::dict out;
          out["tau"] = s.tau;
          out["median_l1rc"] = s.median_l1rc;
          out["medians"] = s.medians;
          out["excluded"] = s.excluded;
          return out;
        },
        py::arg("dataset"), py::arg("grid"));

  // metrics
  m.def("uniform", [] { return ProbDist::uniform().p; });
  m.def("kl_divergence",
        [](const Probs& p, const Probs& q) { return kl_divergence(to_dist(p), to_dist(q)); },
        py::arg("p"), py::arg("q"));
  m.def("signal_kl", [](const Probs& p) { return signal_kl(to_dist(p)); }, py::arg("ideal"));
  m.def("l1_distance",
        [](const Probs& p, const Probs& q) { return l1_distance(to_dist(p), to_dist(q)); },
        py::arg("p"), py::arg("q"));
  m.def("l1_relative_change",
        [](const Probs& ideal, const Probs& mit, const Probs& noisy) {
          return l1_relative_change(to_dist(ideal), to_dist(mit), to_dist(noisy));
        },
        py::arg("ideal"), py::arg("mitigated"), py::arg("noisy"));
  m.def("summarize",
        [](const std::vector<double>& values, int excluded) {
          return summary_dict(summarize(values, excluded));
        },
        py::arg("values"), py::arg("excluded") = 0);

  // calibration pools and datasets
  m.def("gen_pool",
        [](int count, std::uint64_t seed, const std::string& config_path) {
          const SynthPoolConfig cfg =
              config_path.empty() ? SynthPoolConfig{} : load_pool_config(config_path);
          return gen_pool(cfg, count, seed);
        },
        py::arg("count"), py::arg("seed"), py::arg("config_path") = "");
  m.def("save_pool", &save_pool, py::arg("pool"), py::arg("dir"));
  m.def("load_pool", &load_pool, py::arg("dir"));
  m.def("synthesize_dataset",
        [](const std::vector<BackendSnapshot>& pool, std::uint64_t master_seed,
           const std::string& family, int n_circuits, int t_min, int t_max, int steps_min,
           int steps_max, int shots, int repeats, bool exact_probabilities) {
          GenerationSpec g;
          g.family = family;
          g.n_circuits = n_circuits;
          g.t_min = t_min;
          g.t_max = t_max;
          g.steps_min = steps_min;
          g.steps_max = steps_max;
          g.shots = shots;
          g.repeats = repeats;
          g.exact_probabilities = exact_probabilities;
          return synthesize_dataset(g, pool, master_seed);
        },
        py::arg("pool"), py::arg("master_seed"), py::arg("family") = "pauli",
        py::arg("n_circuits") = 100, py::arg("t_min") = 3, py::arg("t_max") = 9,
        py::arg("steps_min") = 14, py::arg("steps_max") = 28, py::arg("shots") = 20000,
        py::arg("repeats") = 3, py::arg("exact_probabilities") = false);
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("split_dataset",
        [](const Dataset& d, std::uint64_t seed, double train_frac, double val_frac) {
          const SplitIndices s = split_dataset(d, seed, train_frac, val_frac);
          return py::make_tuple(s.train, s.val, s.test);
        },
        py::arg("dataset"), py::arg("seed"), py::arg("train_frac") = 0.5,
        py::arg("val_frac") = 0.125);

  // experiment pipeline
  m.def("run_experiment",
        [](const std::string& config_path) {
          const ReportTable t = run_experiment(load_experiment_config(config_path));
          py::list rows;
          for (const auto& r : t.rows) {
            py::dict row = summary_dict(r.stats);
            row["dataset"] = r.dataset;
            row["method"] = r.method;
            rows.append(row);
          }
          return rows;
        },
        py::arg("config_path"));
}
