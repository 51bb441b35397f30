// src/nn.cpp

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

#include "risk/nn.hpp"

#include <cmath>

#include "risk/errors.hpp"

namespace risk {

void AffineLayer::init_gaussian(GaussianStream& stream) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in()));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * stream.next();
  b.setZero();
  zero_grad();
}

void AffineLayer::zero_grad() {
  grad_w.setZero();
  grad_b.setZero();
}

Matrix affine_forward(const AffineLayer& layer, const Matrix& x) {
  if (x.cols() != layer.fan_in())
    throw ShapeError("affine_forward: input has " + std::to_string(x.cols()) +
                     " columns, layer expects " + std::to_string(layer.fan_in()));
  return (x * layer.w.transpose()).rowwise() + layer.b.transpose();
}

Matrix affine_backward(AffineLayer& layer, const Matrix& x, const Matrix& upstream) {
  if (x.cols() != layer.fan_in() || upstream.cols() != layer.fan_out() ||
      x.rows() != upstream.rows())
    throw ShapeError("affine_backward: shape mismatch");
  layer.grad_w.noalias() += upstream.transpose() * x;
  layer.grad_b.noalias() += upstream.colwise().sum().transpose();
  return upstream * layer.w;
}

Matrix tanh_forward(const Matrix& x) { return x.array().tanh(); }

Matrix tanh_backward(const Matrix& y, const Matrix& upstream) {
  return (upstream.array() * (1.0 - y.array().square())).matrix();
}

CrossEntropyResult softmax_cross_entropy(const Matrix& logits,
                                         std::span<const std::int32_t> labels) {
  const Eigen::Index batch = logits.rows();
  const Eigen::Index classes = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != batch)
    throw ShapeError("softmax_cross_entropy: one label per row required");

  CrossEntropyResult out;
  out.grad_logits.resize(batch, classes);
  double total = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const std::int32_t label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= classes)
      throw InvalidArgument("softmax_cross_entropy: label " + std::to_string(label) +
                            " out of range at row " + std::to_string(i));
    // Max-subtraction for stability.
    const double peak = logits.row(i).maxCoeff();
    Eigen::ArrayXd shifted = logits.row(i).transpose().array() - peak;
    Eigen::ArrayXd expd = shifted.exp();
    const double denom = expd.sum();
    total += std::log(denom) - shifted(label);
    out.grad_logits.row(i) = (expd / denom).matrix().transpose();
    out.grad_logits(i, label) -= 1.0;
  }
  out.loss = total / static_cast<double>(batch);
  out.grad_logits /= static_cast<double>(batch);
  return out;
}

MseResult mse_reconstruction(const Matrix& target, const Matrix& recon) {
  if (target.rows() != recon.rows() || target.cols() != recon.cols())
    throw ShapeError("mse_reconstruction: shape mismatch");
  const auto batch = static_cast<double>(target.rows());
  MseResult out;
  Matrix diff = recon - target;
  out.loss = diff.squaredNorm() / batch;
  out.grad_recon = (2.0 / batch) * diff;
  return out;
}

void AdamW::add_param(double* value, const double* grad, Eigen::Index size) {
  slots_.push_back(Slot{value, grad, Eigen::ArrayXd::Zero(size), Eigen::ArrayXd::Zero(size)});
}

void AdamW::step() {
  ++t_;
  const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (Slot& slot : slots_) {
    Eigen::Map<Eigen::ArrayXd> value(slot.value, slot.m.size());
    Eigen::Map<const Eigen::ArrayXd> grad(slot.grad, slot.m.size());
    slot.m = cfg_.beta1 * slot.m + (1.0 - cfg_.beta1) * grad;
    slot.v = cfg_.beta2 * slot.v + (1.0 - cfg_.beta2) * grad.square();
    value -= cfg_.lr * cfg_.weight_decay * value;
    value -= cfg_.lr * (slot.m / bias1) / ((slot.v / bias2).sqrt() + cfg_.eps);
  }
}

double finite_diff_check(const std::function<double()>& loss,
                         std::span<const ParamBlock> blocks, double step) {
  double worst = 0.0;
  for (const ParamBlock& block : blocks) {
    for (Eigen::Index i = 0; i < block.size; ++i) {
      const double saved = block.value[i];
      block.value[i] = saved + step;
      const double up = loss();
      block.value[i] = saved - step;
      const double down = loss();
      block.value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = block.grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace risk
