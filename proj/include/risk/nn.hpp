// risk/nn.hpp

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

#ifndef RISK_NN_HPP
#define RISK_NN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "risk/linalg.hpp"

namespace risk {

// Batches are row-major: row i of a batch matrix is example i.

struct AffineLayer {
  Matrix w;  // out x in
  Vector b;  // out
  Matrix grad_w;
  Vector grad_b;

  AffineLayer() = default;
  AffineLayer(Eigen::Index out, Eigen::Index in)
      : w(Matrix::Zero(out, in)),
        b(Vector::Zero(out)),
        grad_w(Matrix::Zero(out, in)),
        grad_b(Vector::Zero(out)) {}

  Eigen::Index fan_in() const { return w.cols(); }
  Eigen::Index fan_out() const { return w.rows(); }

  /// Gaussian weights scaled by 1/sqrt(fan_in), zero biases.
  void init_gaussian(GaussianStream& stream);
  void zero_grad();
};

/// y = x W^T + b, row per example.
Matrix affine_forward(const AffineLayer& layer, const Matrix& x);

/// Accumulates parameter gradients; returns the gradient w.r.t. x.
Matrix affine_backward(AffineLayer& layer, const Matrix& x, const Matrix& upstream);

Matrix tanh_forward(const Matrix& x);

/// y must be tanh_forward's output for the same x.
Matrix tanh_backward(const Matrix& y, const Matrix& upstream);

struct CrossEntropyResult {
  double loss = 0.0;      // mean over the batch
  Matrix grad_logits;     // (softmax - onehot) / batch
};

CrossEntropyResult softmax_cross_entropy(const Matrix& logits,
                                         std::span<const std::int32_t> labels);

struct MseResult {
  double loss = 0.0;   // mean over the batch of squared distances
  Matrix grad_recon;   // 2 (recon - target) / batch
};

MseResult mse_reconstruction(const Matrix& target, const Matrix& recon);

// AdamW with decoupled weight decay: theta <- theta - lr*wd*theta
// - lr * mhat / (sqrt(vhat) + eps).
struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg) : cfg_(cfg) {}

  /// Parameters update in registration order; value and grad must stay alive
  /// and keep their size.
  void add_param(double* value, const double* grad, Eigen::Index size);
  void add_param(Matrix& value, const Matrix& grad) {
    add_param(value.data(), grad.data(), value.size());
  }
  void add_param(Vector& value, const Vector& grad) {
    add_param(value.data(), grad.data(), value.size());
  }

  /// One optimizer step over every registered parameter.
  void step();

  std::int64_t step_count() const { return t_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  struct Slot {
    double* value;
    const double* grad;
    Eigen::ArrayXd m;
    Eigen::ArrayXd v;
  };
  AdamWConfig cfg_;
  std::vector<Slot> slots_;
  std::int64_t t_ = 0;
};

struct ParamBlock {
  double* value;
  const double* grad;  // analytic gradient, filled before the check
  Eigen::Index size;
};

/// Central-difference check of analytic gradients.  loss() must recompute the
/// scalar objective from the current parameter values.  Returns the maximum
/// relative error |a - n| / max(|a|, |n|, 1e-12) over all coordinates.
double finite_diff_check(const std::function<double()>& loss,
                         std::span<const ParamBlock> blocks, double step = 1e-5);

}  // namespace risk

#endif  // RISK_NN_HPP
