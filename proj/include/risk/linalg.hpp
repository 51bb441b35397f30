// risk/linalg.hpp

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

#ifndef RISK_LINALG_HPP
#define RISK_LINALG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace risk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest order accepted by the dense eigen/SVD routines below.  Everything
// this library decomposes (oracle second moments, principal-angle Gram
// matrices, planted-basis checks) stays in this range.
inline constexpr Eigen::Index kMaxEigOrder = 64;

/// Deterministic scalar stream: MT19937-64 driving a Box-Muller transform.
/// The engine, the uniform mapping ((x >> 11) * 2^-53) and the draw order are
/// all fixed, so a given seed always reproduces the same sequence.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double next();

  /// Uniform integer in [0, n).
  std::uint64_t next_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of i.i.d. standard normal entries, filled row by row
/// from GaussianStream(seed).  Identical (seed, shape) gives bit-identical
/// output.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed);

/// Orthonormal basis of the column space of m (modified Gram-Schmidt with a
/// second pass).  Throws RankError when a column's residual drops below 1e-10.
Matrix qr_orthonormalize(const Matrix& m);

struct EigenDecomposition {
  Vector values;   // sorted descending
  Matrix vectors;  // column k pairs with values[k]; columns orthonormal
};

/// Full eigendecomposition of a symmetric matrix (entrywise symmetric within
/// 1e-10, order <= kMaxEigOrder).
EigenDecomposition sym_eig(const Matrix& s);

/// Singular values of m, nonnegative and sorted descending
/// (dimensions <= kMaxEigOrder).
Vector singular_values(const Matrix& m);

}  // namespace risk

#endif  // RISK_LINALG_HPP
