// src/oracle.cpp

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

#include "risk/oracle.hpp"

#include <cmath>
#include <numbers>

#include "risk/errors.hpp"

namespace risk {

namespace {

double direction_objective(const Matrix& z, const Vector& u) {
  // ||z_i - (z_i . u) u||^2 = ||z_i||^2 - (z_i . u)^2 for unit u.
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double sq = z.row(i).squaredNorm();
    const double along = z.row(i).dot(u);
    total += std::sqrt(std::max(0.0, sq - along * along));
  }
  return total;
}

}  // namespace

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
    throw InvalidArgument("Subspace: need 1 <= d <= D");
  Matrix gram = basis_.transpose() * basis_;
  gram.diagonal().array() -= 1.0;
  if (gram.norm() > 1e-8)
    throw InvalidArgument("Subspace: basis columns are not orthonormal");
}

double gms_objective(const Matrix& z, const Subspace& sub) {
  if (z.cols() != sub.ambient_dim())
    throw ShapeError("gms_objective: data dimension " + std::to_string(z.cols()) +
                     " != subspace ambient dimension " +
                     std::to_string(sub.ambient_dim()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Vector coords = sub.basis().transpose() * z.row(i).transpose();
    total += (z.row(i).transpose() - sub.basis() * coords).norm();
  }
  return total;
}

Subspace pca_subspace(const Matrix& z, Eigen::Index d, bool center) {
  if (d < 1 || d > z.cols())
    throw InvalidArgument("pca_subspace: need 1 <= d <= D");
  if (z.rows() < 1) throw InvalidArgument("pca_subspace: empty data");
  Matrix x = z;
  if (center) x.rowwise() -= z.colwise().mean();
  Matrix second_moment = x.transpose() * x;
  EigenDecomposition dec = sym_eig(second_moment);
  return Subspace(dec.vectors.leftCols(d));
}

GridSearchResult gms_grid_search(const Matrix& z, Eigen::Index d,
                                 double resolution_radians) {
  if (d != 1)
    throw InvalidArgument("gms_grid_search: only d = 1 is supported");
  if (z.cols() != 2 && z.cols() != 3)
    throw InvalidArgument("gms_grid_search: only D in {2, 3} is supported");
  if (resolution_radians <= 0.0)
    throw InvalidArgument("gms_grid_search: resolution must be positive");

  const double pi = std::numbers::pi;
  double best = std::numeric_limits<double>::infinity();
  Vector best_dir;

  auto consider = [&](const Vector& u) {
    double obj = direction_objective(z, u);
    if (obj < best) {
      best = obj;
      best_dir = u;
    }
  };

  if (z.cols() == 2) {
    // Lines through the origin: half circle.
    const auto steps = static_cast<Eigen::Index>(std::ceil(pi / resolution_radians));
    for (Eigen::Index k = 0; k < steps; ++k) {
      const double theta = static_cast<double>(k) * resolution_radians;
      consider(Vector{{std::cos(theta), std::sin(theta)}});
    }
  } else {
    // Half sphere: azimuth in [0, pi), latitude in [-pi/2, pi/2].
    const auto az_steps = static_cast<Eigen::Index>(std::ceil(pi / resolution_radians));
    const auto lat_steps = static_cast<Eigen::Index>(std::ceil(pi / resolution_radians)) + 1;
    for (Eigen::Index a = 0; a < az_steps; ++a) {
      const double phi = static_cast<double>(a) * resolution_radians;
      for (Eigen::Index l = 0; l < lat_steps; ++l) {
        const double psi = -pi / 2.0 + static_cast<double>(l) * resolution_radians;
        consider(Vector{{std::cos(psi) * std::cos(phi), std::cos(psi) * std::sin(phi),
                         std::sin(psi)}});
      }
    }
  }
  return GridSearchResult{Subspace(best_dir), best};
}

IrlsResult gms_irls(const Matrix& z, Eigen::Index d, double delta, int max_iter) {
  if (d < 1 || d > z.cols()) throw InvalidArgument("gms_irls: need 1 <= d <= D");
  if (z.rows() < 1) throw InvalidArgument("gms_irls: empty data");
  if (delta <= 0.0) throw InvalidArgument("gms_irls: delta must be positive");

  // Start from PCA of the row-normalized data: spherizing strips outlier
  // magnitude, so gross outliers cannot pin the initial subspace.
  Matrix spherized = z;
  for (Eigen::Index i = 0; i < spherized.rows(); ++i) {
    const double norm = spherized.row(i).norm();
    if (norm > 0.0) spherized.row(i) /= norm;
  }
  Subspace current = pca_subspace(spherized, d);
  double objective = gms_objective(z, current);
  IrlsResult out{current, {objective}, false};

  for (int iter = 0; iter < max_iter; ++iter) {
    // Weighted second moment with weights 1/max(||r_i||, delta).
    Matrix weighted = Matrix::Zero(z.cols(), z.cols());
    const Matrix& basis = out.subspace.basis();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      Vector zi = z.row(i).transpose();
      Vector residual = zi - basis * (basis.transpose() * zi);
      const double w = 1.0 / std::max(residual.norm(), delta);
      weighted.noalias() += w * zi * zi.transpose();
    }
    Subspace next(sym_eig(weighted).vectors.leftCols(d));
    const double next_objective = gms_objective(z, next);
    if (next_objective < objective - 1e-10) {
      out.subspace = next;
      out.objective_trace.push_back(next_objective);
      objective = next_objective;
    } else {
      out.converged = true;
      break;
    }
  }
  return out;
}

Vector principal_angles(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim())
    throw ShapeError("principal_angles: ambient dimensions differ");
  Vector cosines = singular_values(u.basis().transpose() * v.basis());
  Vector angles(cosines.size());
  for (Eigen::Index i = 0; i < cosines.size(); ++i)
    angles(i) = std::acos(std::clamp(cosines(i), 0.0, 1.0));
  return angles;  // cosines descend, so angles ascend
}

}  // namespace risk
