// risk/model.hpp

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

#ifndef RISK_MODEL_HPP
#define RISK_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "risk/dataset.hpp"
#include "risk/nn.hpp"
#include "risk/oracle.hpp"

namespace risk {

/// Training configuration.  width1/width2 left at 0 resolve to
/// max(D/2, 2d) and max(D/4, 2d); the exact widths matter little as long as
/// the network stays a bottleneck.
struct TrainConfig {
  Eigen::Index d = 4;         // bottleneck / recovered-subspace dimension
  double lambda = 0.01;       // weight of both projection-loss terms
  Eigen::Index width1 = 0;    // first encoder width
  Eigen::Index width2 = 0;    // second encoder width (the recovery layer input)
  double lr = 1e-3;
  double weight_decay = 0.01;
  Eigen::Index batch_size = 64;
  int epochs = 40;
  std::uint64_t seed = 0;
  bool use_recon = true;        // ablation toggle for the reconstruction loss
  bool use_proj = true;         // ablation toggle for the projection loss
  bool proj_on_input = false;   // recovery layer acts on raw features (d x D)
  bool detach_classifier = false;  // classifier trains but does not shape the encoder
  double l1_smoothing = 1e-12;  // eps in sqrt(||r||^2 + eps^2)

  void validate() const;
};

/// The linear map whose row space is the recovered subspace.
struct RecoveryLayer {
  Matrix a;  // d x hidden width
  Matrix grad_a;

  RecoveryLayer() = default;
  RecoveryLayer(Eigen::Index d, Eigen::Index in)
      : a(Matrix::Zero(d, in)), grad_a(Matrix::Zero(d, in)) {}
};

/// Encoder (two tanh stages feeding the recovery layer), mirror decoder and
/// linear classifier head.  With proj_on_input the encoder is the recovery
/// layer alone (d x D) and the decoder a single linear layer.
struct RiskModel {
  TrainConfig cfg;  // resolved configuration echo
  Eigen::Index input_dim = 0;
  std::int32_t num_classes = 0;

  AffineLayer enc1, enc2;
  RecoveryLayer recovery;
  AffineLayer dec1, dec2, dec3;
  AffineLayer classifier;

  bool has_mlp() const { return !cfg.proj_on_input; }
  Eigen::Index hidden_dim() const { return has_mlp() ? cfg.width2 : input_dim; }

  void zero_grad();
  /// All trainable parameters with their gradient buffers, in update order.
  std::vector<ParamBlock> param_blocks();
};

/// Fresh model with Gaussian/sqrt(fan_in) weights drawn from cfg.seed.
/// Resolves default widths against input_dim.
RiskModel make_model(TrainConfig cfg, Eigen::Index input_dim,
                     std::int32_t num_classes);

struct EncodeResult {
  Matrix h;     // batch x hidden width (the recovery layer input)
  Matrix zhat;  // batch x d
};

EncodeResult encode(const RiskModel& model, const Matrix& z);
Matrix decode(const RiskModel& model, const Matrix& zhat);

struct ProjectionLossResult {
  double value = 0.0;
  Matrix grad_a;
  Matrix grad_h;
};

/// lambda * mean_i sqrt(||h_i - A^T A h_i||^2 + eps^2)
/// + lambda * ||A A^T - I_d||_F^2, with gradients for both arguments.
ProjectionLossResult projection_loss(const Matrix& a, const Matrix& h,
                                     double lambda, double eps = 1e-12);

struct LossBreakdown {
  double total = 0.0;
  double ce = 0.0;
  double recon = 0.0;
  double proj = 0.0;
};

/// Forward and backward pass over one batch; accumulates gradients into the
/// model's buffers (call model.zero_grad() first).
LossBreakdown risk_loss(RiskModel& model, const Matrix& z,
                        std::span<const std::int32_t> labels);

struct TrainReport {
  std::vector<double> ce;     // per-epoch batch-size-weighted means
  std::vector<double> recon;
  std::vector<double> proj;
  std::vector<double> total;
  double final_orth_residual = 0.0;  // ||A A^T - I_d||_F after training
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  TrainConfig config;
};

struct TrainResult {
  RiskModel model;
  TrainReport report;
};

/// Trains on every example of `data` (callers pass a split view).  Requires a
/// non-empty dataset containing every class.  Deterministic for a fixed
/// (data, cfg): initialization and the per-epoch shuffles all derive from
/// cfg.seed.
TrainResult train(const FeatureDataset& data, const TrainConfig& cfg);

Matrix predict_logits(const RiskModel& model, const Matrix& z);

/// Argmax of the classifier logits; ties break toward the lower class index.
std::vector<std::int32_t> predict(const RiskModel& model, const Matrix& z);

/// Orthonormalized row space of the recovery layer.
Subspace extract_subspace(const RiskModel& model);

/// JSON document with a shape header and base64 little-endian f64 parameter
/// blocks; load(save(m)) is parameter-bit-exact.
void save_model(const RiskModel& model, const std::filesystem::path& path);
RiskModel load_model(const std::filesystem::path& path);

}  // namespace risk

#endif  // RISK_MODEL_HPP
