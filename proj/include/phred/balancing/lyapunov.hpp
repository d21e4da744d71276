// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace phred {

// Solves A P + P A^T + M = 0 for stable A (Bartels-Stewart on the complex
// Schur form, A = U T U^*).
inline Mat solve_lyapunov(const Mat& A, const Mat& M) {
  const Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n) throw DimensionMismatch("Lyapunov operands must be n x n");
  if (n > dense_ceiling())
    throw SizeLimitExceeded("dense Lyapunov solve refused for n = " + std::to_string(n) + " (ceiling " +
                            std::to_string(dense_ceiling()) + ", set PHRED_DENSE_CEILING to raise it)");
  if (n == 0) return Mat(0, 0);
  Eigen::ComplexSchur<CMat> schur(A.cast<cplx>());
  if (schur.info() != Eigen::Success) throw UnstableMatrix("Schur decomposition failed");
  const CMat& T = schur.matrixT();
  const CMat& U = schur.matrixU();
  const double scale = std::max(1.0, A.norm());
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) abscissa = std::max(abscissa, T(i, i).real());
  if (abscissa > -1e-13 * scale)
    throw UnstableMatrix("matrix is not asymptotically stable (spectral abscissa " + std::to_string(abscissa) + ")");

  // T Y + Y T^* = -U^* M U, columns right to left:
  // (T + conj(T_jj) I) y_j = c_j - sum_{k>j} conj(T_jk) y_k
  CMat Cm = -(U.adjoint() * M.cast<cplx>() * U);
  CMat Y = CMat::Zero(n, n);
  for (Index j = n - 1; j >= 0; --j) {
    CVec rhs = Cm.col(j);
    const Index tail = n - j - 1;
    if (tail > 0) rhs -= Y.rightCols(tail) * T.row(j).tail(tail).conjugate().transpose();
    const cplx shift = std::conj(T(j, j));
    for (Index i = n - 1; i >= 0; --i) {
      cplx acc = rhs(i);
      const Index len = n - i - 1;
      if (len > 0) acc -= (T.row(i).tail(len) * Y.col(j).tail(len))(0, 0);
      Y(i, j) = acc / (T(i, i) + shift);
    }
  }
  Mat P = (U * Y * U.adjoint()).real();
  return 0.5 * (P + P.transpose());
}

inline double lyapunov_residual(const Mat& A, const Mat& P, const Mat& M) {
  return (A * P + P * A.transpose() + M).norm() / std::max(DBL_MIN, M.norm());
}

}  // namespace phred
