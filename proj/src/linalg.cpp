// src/linalg.cpp

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

#include "risk/linalg.hpp"

#include <cmath>
#include <numbers>

#include "risk/errors.hpp"

namespace risk {

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite; u2 in [0, 1).
  double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  double u2 = next_uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t GaussianStream::next_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("next_index: n must be positive");
  auto idx = static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw InvalidArgument("gaussian_matrix: rows and cols must be >= 1");
  GaussianStream stream(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stream.next();
  return m;
}

Matrix qr_orthonormalize(const Matrix& m) {
  constexpr double kRankTol = 1e-10;
  const Eigen::Index k = m.cols();
  Matrix q = m;
  for (Eigen::Index j = 0; j < k; ++j) {
    // Two orthogonalization sweeps keep ||Q^T Q - I|| at roundoff level.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i)
        q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    double norm = q.col(j).norm();
    if (norm < kRankTol)
      throw RankError("qr_orthonormalize: column " + std::to_string(j) +
                      " is numerically dependent on earlier columns");
    q.col(j) /= norm;
  }
  return q;
}

EigenDecomposition sym_eig(const Matrix& s) {
  if (s.rows() != s.cols())
    throw ShapeError("sym_eig: matrix must be square");
  if (s.rows() > kMaxEigOrder)
    throw InvalidArgument("sym_eig: order exceeds " +
                          std::to_string(kMaxEigOrder));
  if (((s - s.transpose()).array().abs() > 1e-10).any())
    throw InvalidArgument("sym_eig: matrix is not symmetric within 1e-10");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw NumericalError("sym_eig", "eigendecomposition failed to converge");

  const Eigen::Index n = s.rows();
  EigenDecomposition dec;
  dec.values = solver.eigenvalues().reverse();
  dec.vectors = solver.eigenvectors().rowwise().reverse();
  (void)n;
  return dec;
}

Vector singular_values(const Matrix& m) {
  if (m.rows() > kMaxEigOrder || m.cols() > kMaxEigOrder)
    throw InvalidArgument("singular_values: dimensions exceed " +
                          std::to_string(kMaxEigOrder));
  if (!m.allFinite())
    throw InvalidArgument("singular_values: entries must be finite");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace risk
