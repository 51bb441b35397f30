// risk/oracle.hpp

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

#ifndef RISK_ORACLE_HPP
#define RISK_ORACLE_HPP

#include <vector>

#include "risk/linalg.hpp"

namespace risk {

/// A d-dimensional subspace of R^D held as an orthonormal basis.
class Subspace {
 public:
  /// basis must be D x d with orthonormal columns (||B^T B - I|| <= 1e-8).
  explicit Subspace(Matrix basis);

  const Matrix& basis() const { return basis_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }

 private:
  Matrix basis_;
};

/// Sum over rows z_i of the Euclidean distance to the subspace,
/// sum_i ||z_i - B B^T z_i||.
double gms_objective(const Matrix& z, const Subspace& sub);

/// Top-d eigenvectors of Z^T Z.  Uncentered by default; `center` subtracts
/// the column means first (the classical PCA convention).
Subspace pca_subspace(const Matrix& z, Eigen::Index d, bool center = false);

struct GridSearchResult {
  Subspace subspace;
  double objective;
};

/// Exhaustive direction grid for the least-absolute-deviations line:
/// the half-circle for D = 2, a latitude-longitude half-sphere for D = 3.
/// Only d = 1 and D in {2, 3} are supported; this exists as a brute-force
/// verification oracle.  Ties break toward the lowest grid index.
GridSearchResult gms_grid_search(const Matrix& z, Eigen::Index d,
                                 double resolution_radians);

struct IrlsResult {
  Subspace subspace;
  std::vector<double> objective_trace;  // accepted iterates, non-increasing
  bool converged;
};

/// Iteratively reweighted least squares for the least-absolute-deviations
/// subspace: weights 1/max(||r_i||, delta), then the top-d eigenvectors of
/// the weighted second-moment matrix.  Initialized from PCA of the
/// row-normalized data.  Stops when the objective improves by less than
/// 1e-10; returns the best iterate seen.
IrlsResult gms_irls(const Matrix& z, Eigen::Index d, double delta = 1e-8,
                    int max_iter = 200);

/// Principal angles between two subspaces of the same ambient space,
/// ascending, in [0, pi/2].
Vector principal_angles(const Subspace& u, const Subspace& v);

}  // namespace risk

#endif  // RISK_ORACLE_HPP
