#include "qemlab/dataset.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"
#include "qemlab/sampling.hpp"
#include "qemlab/statevector.hpp"

namespace qem {

using nlohmann::json;

namespace {

json encoded_to_json(const EncodedCircuit& e) {
  json layers = json::array();
  for (const EncodedLayer& m : e.layers) {
    json rows = json::array();
    for (const auto& row : m) rows.push_back(row);
    layers.push_back(std::move(rows));
  }
  return json{{"depth", e.depth()}, {"layers", std::move(layers)}};
}

EncodedCircuit encoded_from_json(const json& j, int pad_depth) {
  EncodedCircuit e;
  e.pad_depth = pad_depth;
  const auto& layers = j.at("layers");
  if (j.at("depth").get<int>() != static_cast<int>(layers.size())) {
    throw ValidationError("encoded depth does not match layer count");
  }
  for (const auto& rows : layers) {
    EncodedLayer m;
    for (int q = 0; q < kNumQubits; ++q) {
      m[q] = rows.at(q).get<std::array<double, kNumQubits>>();
    }
    e.layers.push_back(m);
  }
  validate_encoding(e);
  return e;
}

json meta_to_json(const RecordMeta& m) {
  return json{{"family", m.family},       {"t", m.t},
              {"n_layers", m.n_layers},   {"repeat", m.repeat_index},
              {"shots", m.shots},         {"circuit_seed", m.circuit_seed},
              {"circuit_index", m.circuit_index}};
}

RecordMeta meta_from_json(const json& j) {
  RecordMeta m;
  m.family = j.at("family").get<std::string>();
  m.t = j.at("t").get<int>();
  m.n_layers = j.at("n_layers").get<int>();
  m.repeat_index = j.at("repeat").get<int>();
  m.shots = j.at("shots").get<int>();
  m.circuit_seed = j.at("circuit_seed").get<std::uint64_t>();
  m.circuit_index = j.at("circuit_index").get<int>();
  return m;
}

ProbDist dist_from_json(const json& j) {
  ProbDist p;
  p.p = j.get<std::array<double, kDim>>();
  if (!p.valid()) throw ValidationError("stored distribution is not a distribution");
  return p;
}

}  // namespace

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file: " + path);
  const json header{{"type", "qemlab_dataset"},
                    {"schema_version", 1},
                    {"family", d.family},
                    {"pad_depth", d.pad_depth},
                    {"shots", d.shots}};
  out << header.dump() << "\n";
  for (const DatasetRecord& r : d.records) {
    json line{{"encoded", encoded_to_json(r.encoded)},
              {"backend", json::parse(snapshot_to_json(r.backend))},
              {"p_ideal", r.p_ideal.p},
              {"p_noisy", r.p_noisy.p},
              {"meta", meta_to_json(r.meta)}};
    out << line.dump() << "\n";
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset file is empty: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dataset header parse error: ") + e.what());
  }
  if (header.value("type", std::string{}) != "qemlab_dataset" ||
      header.value("schema_version", 0) != 1) {
    throw ValidationError("not a qemlab dataset (or unsupported schema_version)");
  }
  Dataset d;
  d.family = header.at("family").get<std::string>();
  d.pad_depth = header.at("pad_depth").get<int>();
  d.shots = header.at("shots").get<int>();
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("dataset line " + std::to_string(ln) + ": " + e.what());
    }
    DatasetRecord r;
    r.encoded = encoded_from_json(j.at("encoded"), d.pad_depth);
    r.backend = snapshot_from_json(j.at("backend").dump());
    r.p_ideal = dist_from_json(j.at("p_ideal"));
    r.p_noisy = dist_from_json(j.at("p_noisy"));
    r.meta = meta_from_json(j.at("meta"));
    d.records.push_back(std::move(r));
  }
  return d;
}

void save_circuits(const std::vector<Circuit>& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write circuit file: " + path);
  const json header{{"type", "qemlab_circuits"}, {"schema_version", 1}};
  out << header.dump() << "\n";
  for (const Circuit& c : cs) {
    json ops = json::array();
    for (const GateOp& op : c.ops) {
      json o = json::array({gate_name(op.kind), op.q0});
      if (op.kind == GateKind::CX) o.push_back(op.q1);
      if (op.kind == GateKind::Rz) o.push_back(op.angle);
      ops.push_back(std::move(o));
    }
    json line{{"family", c.meta.family}, {"t", c.meta.t}, {"seed", c.meta.seed},
              {"ops", std::move(ops)}};
    out << line.dump() << "\n";
  }
}

std::vector<Circuit> load_circuits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open circuit file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("circuit file is empty: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("circuit header parse error: ") + e.what());
  }
  if (header.value("type", std::string{}) != "qemlab_circuits" ||
      header.value("schema_version", 0) != 1) {
    throw ValidationError("not a qemlab circuit file (or unsupported schema_version)");
  }
  std::vector<Circuit> cs;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("circuit line " + std::to_string(ln) + ": " + e.what());
    }
    Circuit c;
    c.meta.family = j.at("family").get<std::string>();
    c.meta.t = j.at("t").get<int>();
    c.meta.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& o : j.at("ops")) {
      const std::string name = o.at(0).get<std::string>();
      const int q0 = o.at(1).get<int>();
      if (name == "x") {
        c.ops.push_back(GateOp::x(q0));
      } else if (name == "sx") {
        c.ops.push_back(GateOp::sx(q0));
      } else if (name == "rz") {
        c.ops.push_back(GateOp::rz(q0, o.at(2).get<double>()));
      } else if (name == "cx") {
        c.ops.push_back(GateOp::cx(q0, o.at(2).get<int>()));
      } else if (name == "measure") {
        c.ops.push_back(GateOp::measure(q0));
      } else {
        throw ValidationError("circuit line " + std::to_string(ln) + ": unknown op '" +
                              name + "'");
      }
    }
    validate_circuit(c);
    cs.push_back(std::move(c));
  }
  return cs;
}

Dataset build_dataset(const std::vector<Circuit>& circuits,
                      const std::vector<BackendSnapshot>& pool,
                      const SimOptions& opts, std::uint64_t master_seed) {
  if (circuits.empty()) throw ValidationError("no circuits to simulate");
  if (pool.empty()) throw ValidationError("snapshot pool is empty");
  if (opts.repeats <= 0) throw ValidationError("repeats must be positive");

  Dataset d;
  d.family = circuits.front().meta.family;
  d.shots = opts.exact_probabilities ? 0 : opts.shots;

  std::vector<int> depths(circuits.size());
  for (std::size_t k = 0; k < circuits.size(); ++k) {
    validate_circuit(circuits[k]);
    depths[k] = static_cast<int>(layer_circuit(circuits[k]).size());
    d.pad_depth = std::max(d.pad_depth, depths[k]);
  }

  d.records.resize(circuits.size() * opts.repeats);
  for (std::size_t k = 0; k < circuits.size(); ++k) {
    const Circuit& c = circuits[k];
    const EncodedCircuit enc = encode_circuit(c, d.pad_depth);
    const ProbDist ideal = ideal_distribution(c);
    for (int rep = 0; rep < opts.repeats; ++rep) {
      const std::uint64_t record_index = k * opts.repeats + rep;
      Rng rng(mix_seed(master_seed, record_index));
      DatasetRecord& r = d.records[record_index];
      r.backend = pool[rng.below(pool.size())];
      const NoiseModel nm = build_noise_model(r.backend, opts.noise);
      const ProbDist exact = noisy_distribution(c, nm);
      r.encoded = enc;
      r.p_ideal = ideal;
      r.p_noisy = opts.exact_probabilities ? exact : sample_shots(exact, opts.shots, rng);
      r.meta = {c.meta.family, c.meta.t,  depths[k],        rep,
                d.shots,       c.meta.seed, static_cast<int>(k)};
    }
  }
  return d;
}

Dataset repad_dataset(const Dataset& d, int pad_depth) {
  for (const auto& r : d.records)
    if (r.encoded.depth() > pad_depth)
      throw ValidationError("repad_dataset: pad_depth " + std::to_string(pad_depth) +
                            " is below a record with " + std::to_string(r.encoded.depth()) +
                            " layers");
  Dataset out = d;
  out.pad_depth = pad_depth;
  for (auto& r : out.records) r.encoded.pad_depth = pad_depth;
  return out;
}

}  // namespace qem
