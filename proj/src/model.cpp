// src/model.cpp

// Copyright 2026  RISK subspace recovery authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "risk/model.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "risk/encoding.hpp"
#include "risk/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "parameter serialization assumes a little-endian host");

namespace risk {

namespace {

using nlohmann::json;

// Everything the trainer derives from the run seed uses fixed streams: the
// init stream is GaussianStream(seed), the shuffle stream this derived engine.
constexpr std::uint64_t kShuffleSalt = 0xD1B54A32D192ED03ULL;

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t n) {
  auto u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  auto idx = static_cast<std::uint64_t>(u * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

struct ForwardPass {
  Matrix t1;      // tanh(enc1)
  Matrix h;       // recovery-layer input
  Matrix zhat;    // bottleneck code
  Matrix r1, r2;  // decoder tanh activations (MLP decoder only)
  Matrix recon;
  Matrix logits;
};

ForwardPass forward(const RiskModel& model, const Matrix& z, bool want_recon) {
  ForwardPass fp;
  if (model.has_mlp()) {
    fp.t1 = tanh_forward(affine_forward(model.enc1, z));
    fp.h = tanh_forward(affine_forward(model.enc2, fp.t1));
  } else {
    fp.h = z;
  }
  fp.zhat = fp.h * model.recovery.a.transpose();
  fp.logits = affine_forward(model.classifier, fp.zhat);
  if (want_recon) {
    if (model.has_mlp()) {
      fp.r1 = tanh_forward(affine_forward(model.dec1, fp.zhat));
      fp.r2 = tanh_forward(affine_forward(model.dec2, fp.r1));
      fp.recon = affine_forward(model.dec3, fp.r2);
    } else {
      fp.recon = affine_forward(model.dec3, fp.zhat);
    }
  }
  return fp;
}

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data", base64_encode(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double))}};
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw FormatError(FormatIssue::bad_field, "model parameter '" + name + "' is malformed");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  auto bytes = base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double))
    throw FormatError(FormatIssue::truncated,
                      "model parameter '" + name + "' has the wrong payload size");
  Matrix m(rows, cols);
  std::memcpy(m.data(), bytes.data(), bytes.size());
  if (!m.allFinite())
    throw FormatError(FormatIssue::bad_field, "model parameter '" + name + "' is non-finite");
  return m;
}

json config_to_json(const TrainConfig& cfg) {
  return json{{"d", cfg.d},
              {"lambda", cfg.lambda},
              {"width1", cfg.width1},
              {"width2", cfg.width2},
              {"lr", cfg.lr},
              {"weight_decay", cfg.weight_decay},
              {"batch_size", cfg.batch_size},
              {"epochs", cfg.epochs},
              {"seed", cfg.seed},
              {"use_recon", cfg.use_recon},
              {"use_proj", cfg.use_proj},
              {"proj_on_input", cfg.proj_on_input},
              {"detach_classifier", cfg.detach_classifier},
              {"l1_smoothing", cfg.l1_smoothing}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  try {
    cfg.d = j.at("d").get<Eigen::Index>();
    cfg.lambda = j.at("lambda").get<double>();
    cfg.width1 = j.at("width1").get<Eigen::Index>();
    cfg.width2 = j.at("width2").get<Eigen::Index>();
    cfg.lr = j.at("lr").get<double>();
    cfg.weight_decay = j.at("weight_decay").get<double>();
    cfg.batch_size = j.at("batch_size").get<Eigen::Index>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.use_recon = j.at("use_recon").get<bool>();
    cfg.use_proj = j.at("use_proj").get<bool>();
    cfg.proj_on_input = j.at("proj_on_input").get<bool>();
    cfg.detach_classifier = j.at("detach_classifier").get<bool>();
    cfg.l1_smoothing = j.at("l1_smoothing").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(FormatIssue::bad_field, std::string("model config: ") + e.what());
  }
  return cfg;
}

}  // namespace

void TrainConfig::validate() const {
  if (d < 1) throw InvalidArgument("TrainConfig: d must be >= 1");
  if (lambda < 0.0) throw InvalidArgument("TrainConfig: lambda must be >= 0");
  if (width1 < 0 || width2 < 0)
    throw InvalidArgument("TrainConfig: widths must be >= 0 (0 = default)");
  if (!proj_on_input && width2 > 0 && d > width2)
    throw InvalidArgument("TrainConfig: d must be <= width2");
  if (lr <= 0.0) throw InvalidArgument("TrainConfig: lr must be positive");
  if (weight_decay < 0.0) throw InvalidArgument("TrainConfig: weight_decay must be >= 0");
  if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
  if (epochs < 0) throw InvalidArgument("TrainConfig: epochs must be >= 0");
  if (l1_smoothing < 0.0) throw InvalidArgument("TrainConfig: l1_smoothing must be >= 0");
}

void RiskModel::zero_grad() {
  enc1.zero_grad();
  enc2.zero_grad();
  recovery.grad_a.setZero();
  dec1.zero_grad();
  dec2.zero_grad();
  dec3.zero_grad();
  classifier.zero_grad();
}

std::vector<ParamBlock> RiskModel::param_blocks() {
  std::vector<ParamBlock> blocks;
  auto add_layer = [&](AffineLayer& layer) {
    if (layer.w.size() == 0) return;
    blocks.push_back({layer.w.data(), layer.grad_w.data(), layer.w.size()});
    blocks.push_back({layer.b.data(), layer.grad_b.data(), layer.b.size()});
  };
  add_layer(enc1);
  add_layer(enc2);
  blocks.push_back({recovery.a.data(), recovery.grad_a.data(), recovery.a.size()});
  add_layer(dec1);
  add_layer(dec2);
  add_layer(dec3);
  add_layer(classifier);
  return blocks;
}

RiskModel make_model(TrainConfig cfg, Eigen::Index input_dim,
                     std::int32_t num_classes) {
  if (input_dim < 1) throw InvalidArgument("make_model: input_dim must be >= 1");
  if (num_classes < 2) throw InvalidArgument("make_model: need at least 2 classes");
  if (cfg.width1 == 0) cfg.width1 = std::max(input_dim / 2, 2 * cfg.d);
  if (cfg.width2 == 0) cfg.width2 = std::max(input_dim / 4, 2 * cfg.d);
  cfg.validate();
  if (!cfg.proj_on_input && cfg.d > cfg.width2)
    throw InvalidArgument("make_model: d must be <= width2");

  RiskModel model;
  model.cfg = cfg;
  model.input_dim = input_dim;
  model.num_classes = num_classes;

  GaussianStream stream(cfg.seed);
  const Eigen::Index hidden = cfg.proj_on_input ? input_dim : cfg.width2;
  if (!cfg.proj_on_input) {
    model.enc1 = AffineLayer(cfg.width1, input_dim);
    model.enc1.init_gaussian(stream);
    model.enc2 = AffineLayer(cfg.width2, cfg.width1);
    model.enc2.init_gaussian(stream);
  }
  model.recovery = RecoveryLayer(cfg.d, hidden);
  {
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index i = 0; i < cfg.d; ++i)
      for (Eigen::Index j = 0; j < hidden; ++j)
        model.recovery.a(i, j) = scale * stream.next();
  }
  if (!cfg.proj_on_input) {
    model.dec1 = AffineLayer(cfg.width2, cfg.d);
    model.dec1.init_gaussian(stream);
    model.dec2 = AffineLayer(cfg.width1, cfg.width2);
    model.dec2.init_gaussian(stream);
    model.dec3 = AffineLayer(input_dim, cfg.width1);
    model.dec3.init_gaussian(stream);
  } else {
    model.dec3 = AffineLayer(input_dim, cfg.d);
    model.dec3.init_gaussian(stream);
  }
  model.classifier = AffineLayer(num_classes, cfg.d);
  model.classifier.init_gaussian(stream);
  return model;
}

EncodeResult encode(const RiskModel& model, const Matrix& z) {
  if (z.cols() != model.input_dim)
    throw ShapeError("encode: input dimension mismatch");
  ForwardPass fp = forward(model, z, /*want_recon=*/false);
  return EncodeResult{std::move(fp.h), std::move(fp.zhat)};
}

Matrix decode(const RiskModel& model, const Matrix& zhat) {
  if (zhat.cols() != model.cfg.d)
    throw ShapeError("decode: code dimension mismatch");
  if (model.has_mlp()) {
    Matrix r1 = tanh_forward(affine_forward(model.dec1, zhat));
    Matrix r2 = tanh_forward(affine_forward(model.dec2, r1));
    return affine_forward(model.dec3, r2);
  }
  return affine_forward(model.dec3, zhat);
}

ProjectionLossResult projection_loss(const Matrix& a, const Matrix& h,
                                     double lambda, double eps) {
  if (a.cols() != h.cols())
    throw ShapeError("projection_loss: A and H disagree on the hidden width");
  if (lambda < 0.0) throw InvalidArgument("projection_loss: lambda must be >= 0");
  if (h.rows() < 1) throw InvalidArgument("projection_loss: empty batch");

  const auto batch = static_cast<double>(h.rows());
  const Matrix gram = a.transpose() * a;          // A^T A
  Matrix residual = h - h * gram;                 // rows: h_i - A^T A h_i

  ProjectionLossResult out;
  out.grad_a = Matrix::Zero(a.rows(), a.cols());
  out.grad_h = Matrix::Zero(h.rows(), h.cols());

  // Smoothed least-absolute-deviations data term.
  Matrix weighted = residual;  // becomes rows r_i / s_i
  double data = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double s = std::sqrt(residual.row(i).squaredNorm() + eps * eps);
    data += s;
    if (s > 0.0) weighted.row(i) /= s;
    else weighted.row(i).setZero();  // eps = 0 at an interpolated point
  }
  out.value = lambda * data / batch;
  out.grad_h = (lambda / batch) * weighted * (Matrix::Identity(a.cols(), a.cols()) - gram);
  out.grad_a = -(lambda / batch) * a *
               (h.transpose() * weighted + weighted.transpose() * h);

  // Orthogonality penalty ||A A^T - I_d||_F^2.
  Matrix defect = a * a.transpose();
  defect.diagonal().array() -= 1.0;
  out.value += lambda * defect.squaredNorm();
  out.grad_a += 4.0 * lambda * defect * a;
  return out;
}

LossBreakdown risk_loss(RiskModel& model, const Matrix& z,
                        std::span<const std::int32_t> labels) {
  if (z.rows() < 1) throw InvalidArgument("risk_loss: empty batch");
  if (z.cols() != model.input_dim) throw ShapeError("risk_loss: input dimension mismatch");

  const TrainConfig& cfg = model.cfg;
  ForwardPass fp = forward(model, z, cfg.use_recon);

  LossBreakdown out;
  CrossEntropyResult ce = softmax_cross_entropy(fp.logits, labels);
  out.ce = ce.loss;

  Matrix dzhat = Matrix::Zero(fp.zhat.rows(), fp.zhat.cols());
  {
    Matrix into_zhat = affine_backward(model.classifier, fp.zhat, ce.grad_logits);
    if (!cfg.detach_classifier) dzhat += into_zhat;
  }

  if (cfg.use_recon) {
    MseResult mse = mse_reconstruction(z, fp.recon);
    out.recon = mse.loss;
    if (model.has_mlp()) {
      Matrix dr2 = affine_backward(model.dec3, fp.r2, mse.grad_recon);
      Matrix dd2 = tanh_backward(fp.r2, dr2);
      Matrix dr1 = affine_backward(model.dec2, fp.r1, dd2);
      Matrix dd1 = tanh_backward(fp.r1, dr1);
      dzhat += affine_backward(model.dec1, fp.zhat, dd1);
    } else {
      dzhat += affine_backward(model.dec3, fp.zhat, mse.grad_recon);
    }
  }

  Matrix dh = dzhat * model.recovery.a;
  model.recovery.grad_a.noalias() += dzhat.transpose() * fp.h;

  if (cfg.use_proj) {
    ProjectionLossResult proj =
        projection_loss(model.recovery.a, fp.h, cfg.lambda, cfg.l1_smoothing);
    out.proj = proj.value;
    model.recovery.grad_a += proj.grad_a;
    dh += proj.grad_h;
  }

  if (model.has_mlp()) {
    Matrix da2 = tanh_backward(fp.h, dh);
    Matrix dt1 = affine_backward(model.enc2, fp.t1, da2);
    Matrix da1 = tanh_backward(fp.t1, dt1);
    affine_backward(model.enc1, z, da1);
  }
  // proj_on_input: h is the raw data, nothing upstream to push into.

  out.total = out.ce + out.recon + out.proj;
  return out;
}

TrainResult train(const FeatureDataset& data, const TrainConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  data.validate();
  if (data.size() < 1) throw InvalidArgument("train: training split is empty");
  {
    std::set<std::int32_t> seen(data.labels.begin(), data.labels.end());
    if (static_cast<std::int32_t>(seen.size()) != data.num_classes)
      throw InvalidArgument("train: every class must appear in the training split");
  }

  RiskModel model = make_model(cfg, data.dim(), data.num_classes);
  TrainReport report;
  report.seed = cfg.seed;
  report.config = model.cfg;

  AdamWConfig opt_cfg;
  opt_cfg.lr = cfg.lr;
  opt_cfg.weight_decay = cfg.weight_decay;
  AdamW optimizer(opt_cfg);
  for (const ParamBlock& block : model.param_blocks())
    optimizer.add_param(block.value, block.grad, block.size);

  const Eigen::Index n = data.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 shuffle_engine(cfg.seed ^ kShuffleSalt);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with an explicit uniform mapping, so shuffles do not
    // depend on the standard library's std::shuffle implementation.
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(
          uniform_below(shuffle_engine, static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    LossBreakdown sums;
    for (Eigen::Index begin = 0; begin < n; begin += cfg.batch_size) {
      const Eigen::Index size = std::min(cfg.batch_size, n - begin);
      Matrix batch(size, data.dim());
      std::vector<std::int32_t> batch_labels(static_cast<std::size_t>(size));
      for (Eigen::Index k = 0; k < size; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(begin + k)];
        batch.row(k) = data.features.row(src);
        batch_labels[static_cast<std::size_t>(k)] = data.labels[static_cast<std::size_t>(src)];
      }
      model.zero_grad();
      LossBreakdown loss = risk_loss(model, batch, batch_labels);
      if (!std::isfinite(loss.total)) {
        const char* component = !std::isfinite(loss.ce)      ? "cross-entropy"
                                : !std::isfinite(loss.recon) ? "reconstruction"
                                : !std::isfinite(loss.proj)  ? "projection"
                                                             : "total";
        throw NumericalError(component,
                             "train: non-finite " + std::string(component) +
                                 " loss at epoch " + std::to_string(epoch));
      }
      optimizer.step();
      const auto w = static_cast<double>(size);
      sums.ce += w * loss.ce;
      sums.recon += w * loss.recon;
      sums.proj += w * loss.proj;
      sums.total += w * loss.total;
    }
    const auto scale = 1.0 / static_cast<double>(n);
    report.ce.push_back(sums.ce * scale);
    report.recon.push_back(sums.recon * scale);
    report.proj.push_back(sums.proj * scale);
    report.total.push_back(sums.total * scale);
  }

  Matrix defect = model.recovery.a * model.recovery.a.transpose();
  defect.diagonal().array() -= 1.0;
  report.final_orth_residual = defect.norm();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainResult{std::move(model), std::move(report)};
}

Matrix predict_logits(const RiskModel& model, const Matrix& z) {
  return forward(model, z, /*want_recon=*/false).logits;
}

std::vector<std::int32_t> predict(const RiskModel& model, const Matrix& z) {
  Matrix logits = predict_logits(model, z);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    labels[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(best);
  }
  return labels;
}

Subspace extract_subspace(const RiskModel& model) {
  return Subspace(qr_orthonormalize(model.recovery.a.transpose()));
}

void save_model(const RiskModel& model, const std::filesystem::path& path) {
  json doc{{"schema", "risk_model_v1"},
           {"input_dim", model.input_dim},
           {"num_classes", model.num_classes},
           {"config", config_to_json(model.cfg)}};
  json params;
  params["recovery.a"] = matrix_to_json(model.recovery.a);
  auto put_layer = [&](const char* name, const AffineLayer& layer) {
    if (layer.w.size() == 0) return;
    params[std::string(name) + ".w"] = matrix_to_json(layer.w);
    params[std::string(name) + ".b"] = matrix_to_json(layer.b);
  };
  put_layer("enc1", model.enc1);
  put_layer("enc2", model.enc2);
  put_layer("dec1", model.dec1);
  put_layer("dec2", model.dec2);
  put_layer("dec3", model.dec3);
  put_layer("classifier", model.classifier);
  doc["params"] = std::move(params);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

RiskModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError(FormatIssue::bad_field, path.string() + ": " + e.what());
  }
  if (doc.value("schema", "") != "risk_model_v1")
    throw FormatError(FormatIssue::bad_magic, path.string() + ": not a risk_model_v1 document");

  TrainConfig cfg = config_from_json(doc.at("config"));
  RiskModel model = make_model(cfg, doc.at("input_dim").get<Eigen::Index>(),
                               doc.at("num_classes").get<std::int32_t>());
  const json& params = doc.at("params");
  auto get = [&](const std::string& name) {
    if (!params.contains(name))
      throw FormatError(FormatIssue::bad_field, path.string() + ": missing parameter " + name);
    return matrix_from_json(params.at(name), name);
  };
  auto load_layer = [&](const char* name, AffineLayer& layer) {
    if (layer.w.size() == 0) return;
    Matrix w = get(std::string(name) + ".w");
    Matrix b = get(std::string(name) + ".b");
    if (w.rows() != layer.w.rows() || w.cols() != layer.w.cols() || b.size() != layer.b.size())
      throw FormatError(FormatIssue::bad_field,
                        path.string() + ": parameter " + name + " has the wrong shape");
    layer.w = std::move(w);
    layer.b = Vector(b.reshaped());
  };
  Matrix a = get("recovery.a");
  if (a.rows() != model.recovery.a.rows() || a.cols() != model.recovery.a.cols())
    throw FormatError(FormatIssue::bad_field, path.string() + ": recovery.a has the wrong shape");
  model.recovery.a = std::move(a);
  load_layer("enc1", model.enc1);
  load_layer("enc2", model.enc2);
  load_layer("dec1", model.dec1);
  load_layer("dec2", model.dec2);
  load_layer("dec3", model.dec3);
  load_layer("classifier", model.classifier);
  return model;
}

}  // namespace risk
