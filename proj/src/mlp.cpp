#include "qemlab/mlp.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "qemlab/error.hpp"
#include "qemlab/rng.hpp"

namespace qem {

using nlohmann::json;

namespace {

void check_dims(const MlpConfig& cfg) {
  if (cfg.layer_dims.size() < 2) throw ValidationError("mlp: need at least input and output dims");
  if (cfg.layer_dims.back() != kDim)
    throw ValidationError("mlp: output dim must be " + std::to_string(kDim));
  for (int d : cfg.layer_dims)
    if (d <= 0) throw ValidationError("mlp: layer dims must be positive");
}

}  // namespace

Mlp::Mlp(MlpConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  check_dims(cfg_);
  Rng rng(seed);
  const auto& dims = cfg_.layer_dims;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer layer;
    layer.W.resize(dims[k + 1], dims[k]);
    layer.b.resize(dims[k + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[k]));
    for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
        layer.W(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < layer.b.size(); ++r) layer.b(r) = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  for (int k = 0; k < n_hidden(); ++k) {
    BatchNorm norm;
    const int width = dims[static_cast<std::size_t>(k) + 1];
    norm.gamma = Eigen::VectorXd::Ones(width);
    norm.beta = Eigen::VectorXd::Zero(width);
    norm.run_mean = Eigen::VectorXd::Zero(width);
    norm.run_var = Eigen::VectorXd::Ones(width);
    bn.push_back(std::move(norm));
  }
}

Eigen::MatrixXd Mlp::assemble_input(const Eigen::MatrixXd& x_cb,
                                    const Eigen::MatrixXd& p_noisy) const {
  if (p_noisy.cols() != kDim)
    throw ValidationError("mlp: p_noisy must have " + std::to_string(kDim) + " columns");
  if (x_cb.rows() != p_noisy.rows()) throw ValidationError("mlp: batch row counts differ");
  const int want = input_dim();
  if (cfg_.head == Head::Prediction) {
    if (x_cb.cols() + kDim != want)
      throw ValidationError("mlp: input dim mismatch, expected " + std::to_string(want) +
                            " = " + std::to_string(x_cb.cols()) + " features + " +
                            std::to_string(kDim));
    Eigen::MatrixXd in(x_cb.rows(), want);
    in << x_cb, p_noisy;
    return in;
  }
  if (x_cb.cols() != want)
    throw ValidationError("mlp: input dim mismatch, expected " + std::to_string(want) +
                          " features, got " + std::to_string(x_cb.cols()));
  return x_cb;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd q(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double zmax = z.row(r).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      q(r, c) = std::exp(z(r, c) - zmax);
      sum += q(r, c);
    }
    q.row(r) /= sum;
  }
  return q;
}

Eigen::MatrixXd Mlp::forward_eval(const Eigen::MatrixXd& x_cb,
                                  const Eigen::MatrixXd& p_noisy) const {
  Eigen::MatrixXd h = assemble_input(x_cb, p_noisy);
  for (int k = 0; k < n_hidden(); ++k) {
    Eigen::MatrixXd z = (h * layers[k].W.transpose()).rowwise() + layers[k].b.transpose();
    const auto& norm = bn[k];
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      const double istd = 1.0 / std::sqrt(norm.run_var(c) + bn_epsilon);
      z.col(c) =
          (((z.col(c).array() - norm.run_mean(c)) * istd) * norm.gamma(c) + norm.beta(c))
              .matrix();
    }
    h = cfg_.activation == Activation::ReLU ? z.cwiseMax(0.0).eval()
                                            : z.array().tanh().matrix().eval();
  }
  Eigen::MatrixXd logits =
      (h * layers.back().W.transpose()).rowwise() + layers.back().b.transpose();
  if (cfg_.head == Head::Correction) logits = logits.cwiseProduct(p_noisy);
  return softmax_rows(logits);
}

ForwardCache Mlp::forward_train(const Eigen::MatrixXd& x_cb, const Eigen::MatrixXd& p_noisy) {
  ForwardCache cache;
  cache.p_noisy = p_noisy;
  Eigen::MatrixXd h = assemble_input(x_cb, p_noisy);
  const auto m = static_cast<double>(h.rows());
  if (n_hidden() > 0 && h.rows() < 2)
    throw ValidationError("mlp: train-mode batch statistics need at least 2 samples");

  for (int k = 0; k < n_hidden(); ++k) {
    cache.inputs.push_back(h);
    Eigen::MatrixXd z = (h * layers[k].W.transpose()).rowwise() + layers[k].b.transpose();
    auto& norm = bn[k];

    const Eigen::VectorXd mu = z.colwise().mean().transpose();
    Eigen::MatrixXd centered = z.rowwise() - mu.transpose();
    const Eigen::VectorXd var = centered.array().square().colwise().mean().transpose();

    Eigen::MatrixXd xhat(z.rows(), z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      xhat.col(c) = centered.col(c) / std::sqrt(var(c) + bn_epsilon);

    // PyTorch convention: normalize with the biased variance, track the
    // unbiased one in the running estimate.
    const Eigen::VectorXd var_unbiased = var * (m / (m - 1.0));
    norm.run_mean = (1.0 - bn_momentum) * norm.run_mean + bn_momentum * mu;
    norm.run_var = (1.0 - bn_momentum) * norm.run_var + bn_momentum * var_unbiased;

    Eigen::MatrixXd y(z.rows(), z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      y.col(c) = xhat.col(c) * norm.gamma(c) + Eigen::VectorXd::Constant(z.rows(), norm.beta(c));

    cache.bn_mean.push_back(mu);
    cache.bn_var.push_back(var);
    cache.bn_xhat.push_back(std::move(xhat));

    h = cfg_.activation == Activation::ReLU ? y.cwiseMax(0.0).eval()
                                            : y.array().tanh().matrix().eval();
    cache.activated.push_back(h);
  }

  cache.inputs.push_back(h);
  Eigen::MatrixXd logits =
      (h * layers.back().W.transpose()).rowwise() + layers.back().b.transpose();
  if (cfg_.head == Head::Correction) logits = logits.cwiseProduct(p_noisy);
  cache.q = softmax_rows(logits);
  return cache;
}

double batch_loss(const Eigen::MatrixXd& q, const Eigen::MatrixXd& p_target,
                  const LossSpec& spec) {
  if (q.rows() != p_target.rows() || q.cols() != kDim || p_target.cols() != kDim)
    throw ValidationError("batch_loss: shape mismatch");
  double sum = 0.0;
  std::array<double, kDim> qr{}, pr{};
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    for (int c = 0; c < kDim; ++c) {
      qr[static_cast<std::size_t>(c)] = q(r, c);
      pr[static_cast<std::size_t>(c)] = p_target(r, c);
    }
    sum += loss_value(spec, qr.data(), pr.data());
  }
  return sum / static_cast<double>(q.rows());
}

Gradients Mlp::backward(const ForwardCache& cache, const Eigen::MatrixXd& p_target,
                        const LossSpec& spec) const {
  const Eigen::Index n = cache.q.rows();
  if (p_target.rows() != n || p_target.cols() != kDim)
    throw ValidationError("backward: target shape mismatch");

  // dL/d(logits) through the softmax, for the batch-mean loss
  Eigen::MatrixXd dlogits(n, kDim);
  std::array<double, kDim> qr{}, pr{};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < kDim; ++c) {
      qr[static_cast<std::size_t>(c)] = cache.q(r, c);
      pr[static_cast<std::size_t>(c)] = p_target(r, c);
    }
    const auto g = loss_grad(spec, qr.data(), pr.data());
    double dot = 0.0;
    for (int c = 0; c < kDim; ++c) dot += qr[static_cast<std::size_t>(c)] * g[static_cast<std::size_t>(c)];
    for (int c = 0; c < kDim; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      dlogits(r, c) = qr[ci] * (g[ci] - dot) / static_cast<double>(n);
    }
  }
  if (cfg_.head == Head::Correction) dlogits = dlogits.cwiseProduct(cache.p_noisy);

  Gradients grads;
  grads.layers.resize(layers.size());
  grads.bn_gamma.resize(static_cast<std::size_t>(n_hidden()));
  grads.bn_beta.resize(static_cast<std::size_t>(n_hidden()));

  // output layer
  Eigen::MatrixXd dcur = dlogits;
  const std::size_t last = layers.size() - 1;
  grads.layers[last].W = dcur.transpose() * cache.inputs[last];
  grads.layers[last].b = dcur.colwise().sum().transpose();
  Eigen::MatrixXd dh = dcur * layers[last].W;

  for (int k = n_hidden() - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXd& act = cache.activated[ku];
    Eigen::MatrixXd dy;
    if (cfg_.activation == Activation::ReLU)
      dy = (act.array() > 0.0).cast<double>().matrix().cwiseProduct(dh);
    else
      dy = (1.0 - act.array().square()).matrix().cwiseProduct(dh);

    const auto& norm = bn[ku];
    const Eigen::MatrixXd& xhat = cache.bn_xhat[ku];
    const Eigen::VectorXd& var = cache.bn_var[ku];
    const auto m = static_cast<double>(dy.rows());

    grads.bn_gamma[ku] = dy.cwiseProduct(xhat).colwise().sum().transpose();
    grads.bn_beta[ku] = dy.colwise().sum().transpose();

    Eigen::MatrixXd dxhat(dy.rows(), dy.cols());
    for (Eigen::Index c = 0; c < dy.cols(); ++c) dxhat.col(c) = dy.col(c) * norm.gamma(c);

    Eigen::MatrixXd dz(dy.rows(), dy.cols());
    for (Eigen::Index c = 0; c < dy.cols(); ++c) {
      const double istd = 1.0 / std::sqrt(var(c) + bn_epsilon);
      const Eigen::VectorXd xmu = xhat.col(c) / istd;
      const double dvar = dxhat.col(c).dot(xmu) * (-0.5) * istd * istd * istd;
      const double dmu = -istd * dxhat.col(c).sum() + dvar * (-2.0 / m) * xmu.sum();
      dz.col(c) = dxhat.col(c) * istd + (2.0 / m) * dvar * xmu +
                  Eigen::VectorXd::Constant(dy.rows(), dmu / m);
    }

    grads.layers[ku].W = dz.transpose() * cache.inputs[ku];
    grads.layers[ku].b = dz.colwise().sum().transpose();
    dh = dz * layers[ku].W;
  }
  return grads;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ValidationError("checkpoint: bad shape for " + what);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError("checkpoint: bad shape for " + what);
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index size, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw ValidationError("checkpoint: bad shape for " + what);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json mlp_to_json(const Mlp& m) {
  json j;
  j["layer_dims"] = m.config().layer_dims;
  j["activation"] = m.config().activation == Activation::ReLU ? "relu" : "tanh";
  j["head"] = m.config().head == Head::Prediction ? "prediction" : "correction";
  json jl = json::array();
  for (const auto& layer : m.layers)
    jl.push_back({{"W", matrix_to_json(layer.W)}, {"b", vector_to_json(layer.b)}});
  j["layers"] = std::move(jl);
  json jb = json::array();
  for (const auto& norm : m.bn)
    jb.push_back({{"gamma", vector_to_json(norm.gamma)},
                  {"beta", vector_to_json(norm.beta)},
                  {"run_mean", vector_to_json(norm.run_mean)},
                  {"run_var", vector_to_json(norm.run_var)}});
  j["bn"] = std::move(jb);
  return j;
}

Mlp mlp_from_json(const json& j) {
  MlpConfig cfg;
  cfg.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  const auto act = j.at("activation").get<std::string>();
  if (act == "relu")
    cfg.activation = Activation::ReLU;
  else if (act == "tanh")
    cfg.activation = Activation::Tanh;
  else
    throw ValidationError("checkpoint: unknown activation '" + act + "'");
  const auto head = j.at("head").get<std::string>();
  if (head == "prediction")
    cfg.head = Head::Prediction;
  else if (head == "correction")
    cfg.head = Head::Correction;
  else
    throw ValidationError("checkpoint: unknown head '" + head + "'");

  Mlp m(cfg, 0);
  const auto& jl = j.at("layers");
  if (jl.size() != m.layers.size()) throw ValidationError("checkpoint: layer count mismatch");
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    auto& layer = m.layers[k];
    layer.W = matrix_from_json(jl[k].at("W"), layer.W.rows(), layer.W.cols(),
                               "layers[" + std::to_string(k) + "].W");
    layer.b = vector_from_json(jl[k].at("b"), layer.b.size(),
                               "layers[" + std::to_string(k) + "].b");
  }
  const auto& jb = j.at("bn");
  if (jb.size() != m.bn.size()) throw ValidationError("checkpoint: bn count mismatch");
  for (std::size_t k = 0; k < m.bn.size(); ++k) {
    auto& norm = m.bn[k];
    const auto name = "bn[" + std::to_string(k) + "]";
    norm.gamma = vector_from_json(jb[k].at("gamma"), norm.gamma.size(), name);
    norm.beta = vector_from_json(jb[k].at("beta"), norm.beta.size(), name);
    norm.run_mean = vector_from_json(jb[k].at("run_mean"), norm.run_mean.size(), name);
    norm.run_var = vector_from_json(jb[k].at("run_var"), norm.run_var.size(), name);
  }
  return m;
}

}  // namespace

void save_mlp_json(const Mlp& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << mlp_to_json(m).dump() << "\n";
}

void save_checkpoint(const Mlp& m, const CheckpointExtra& extra, const std::string& path) {
  json j;
  j["type"] = "qemlab_checkpoint";
  j["schema_version"] = 1;
  j["model"] = mlp_to_json(m);
  j["pad_depth"] = extra.pad_depth;
  j["config_hash"] = extra.config_hash;
  if (!extra.preprocessor_json.empty())
    j["preprocessor"] = json::parse(extra.preprocessor_json);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump() << "\n";
}

Mlp load_checkpoint(const std::string& path, CheckpointExtra* extra) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': " + e.what());
  }
  if (j.value("type", "") != "qemlab_checkpoint")
    throw ValidationError("checkpoint '" + path + "': wrong file type");
  if (j.value("schema_version", 0) != 1)
    throw ValidationError("checkpoint '" + path + "': unsupported schema version");
  if (extra) {
    extra->pad_depth = j.value("pad_depth", 0);
    extra->config_hash = j.value("config_hash", "");
    extra->preprocessor_json = j.contains("preprocessor") ? j["preprocessor"].dump() : "";
  }
  try {
    return mlp_from_json(j.at("model"));
  } catch (const json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace qem
