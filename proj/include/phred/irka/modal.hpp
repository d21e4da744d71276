// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/interpolation_data.hpp"
#include "phred/core/state_space.hpp"

#include <Eigen/Eigenvalues>

namespace phred {

// Pole-residue data of a reduced model: E^{-1}A = X diag(poles) X^{-1},
// G(s) = sum_k c_k b_k^T / (s - poles_k) with b_k^T the rows of
// X^{-1} E^{-1} B and c_k the columns of C X.
struct ModalData {
  CVec poles;
  CMat X;      // unit-norm right eigenvectors
  CMat F;      // r x m, row k is b_k^T = y_k^* E^{-1} B (y_k^* x_k = 1)
  CMat Cres;   // p x r, column k is c_k
  double cond_X = 1.0;
};

inline ModalData modal_decomposition(const Mat& A, const Mat& B, const Mat& C, const Mat* E = nullptr) {
  const Index r = A.rows();
  Mat As = A, Bs = B;
  if (E) {
    Eigen::PartialPivLU<Mat> lu(*E);
    As = lu.solve(A);
    Bs = lu.solve(B);
  }
  Eigen::EigenSolver<Mat> es(As, true);
  if (es.info() != Eigen::Success) throw DefectiveEigenproblem("reduced eigenvalue problem did not converge");
  CVec ev = es.eigenvalues();
  CMat V = es.eigenvectors();
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return canonical_less(ev(a), ev(b)); });
  ModalData md;
  md.poles.resize(r);
  md.X.resize(r, r);
  for (Index k = 0; k < r; ++k) {
    md.poles(k) = ev(order[k]);
    CVec x = V.col(order[k]);
    md.X.col(k) = x / x.norm();
  }
  md.cond_X = cond2(md.X);
  Eigen::PartialPivLU<CMat> lx(md.X);
  md.F = lx.solve(Bs.cast<cplx>());
  md.Cres = C.cast<cplx>() * md.X;
  return md;
}

inline ModalData modal_decomposition(const StateSpaceSystem& sys) {
  if (sys.e_identity) return modal_decomposition(sys.dense_A(), sys.B, sys.C);
  Mat E = sys.dense_E();
  return modal_decomposition(sys.dense_A(), sys.B, sys.C, &E);
}

}  // namespace phred
