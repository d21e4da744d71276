// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdlib>
#include <string>

namespace phred {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;
using SpCMat = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

// Below this size dense kernels are used for factorizations.
inline constexpr Index kDenseBelow = 500;

// Size limit for the O(n^3) dense algorithms (Lyapunov, balancing, Gramian H2).
// PHRED_DENSE_CEILING overrides the default of 2000.
inline Index dense_ceiling() {
  if (const char* env = std::getenv("PHRED_DENSE_CEILING")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<Index>(v);
  }
  return 2000;
}

inline SpMat to_sparse(const Mat& m) { return m.sparseView(0.0, 0.0); }

inline SpMat identity(Index n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace phred
