// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/linalg.hpp"

namespace phred {

// Realization E x' = A x + B u, y = C x. E and A are sparse; B and C are
// dense (few ports). Build through make_state_space so the invariants hold.
struct StateSpaceSystem {
  SpMat E, A;
  Mat B, C;
  bool e_identity = true;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }

  Mat dense_A() const { return Mat(A); }
  Mat dense_E() const { return Mat(E); }
};

inline bool is_identity(const SpMat& E) {
  if (E.rows() != E.cols()) return false;
  Index ones = 0;
  for (Index k = 0; k < E.outerSize(); ++k)
    for (SpMat::InnerIterator it(E, k); it; ++it) {
      if (it.row() == it.col() && it.value() == 1.0)
        ++ones;
      else if (it.value() != 0.0)
        return false;
    }
  return ones == E.rows();
}

inline StateSpaceSystem make_state_space(SpMat E, SpMat A, Mat B, Mat C) {
  const Index n = A.rows();
  if (n == 0 || A.cols() != n || E.rows() != n || E.cols() != n || B.rows() != n || C.cols() != n || B.cols() == 0 ||
      C.rows() == 0)
    throw DimensionMismatch("inconsistent state-space dimensions");
  if (!all_finite(E) || !all_finite(A) || !all_finite(B) || !all_finite(C))
    throw BadParams("state-space matrices contain non-finite entries");
  E.makeCompressed();
  A.makeCompressed();
  StateSpaceSystem s{std::move(E), std::move(A), std::move(B), std::move(C), false};
  s.e_identity = is_identity(s.E);
  if (!s.e_identity) {
    bool ok;
    if (n < kDenseBelow) {
      Eigen::PartialPivLU<Mat> lu{Mat(s.E)};
      ok = !numerically_singular(lu);
    } else {
      Eigen::SparseLU<SpMat> lu(s.E);
      ok = lu.info() == Eigen::Success;
    }
    if (!ok) throw SingularPencil("E is singular");
  }
  return s;
}

inline StateSpaceSystem make_state_space(const Mat& E, const Mat& A, const Mat& B, const Mat& C) {
  return make_state_space(to_sparse(E), to_sparse(A), B, C);
}

inline StateSpaceSystem make_state_space(const Mat& A, const Mat& B, const Mat& C) {
  return make_state_space(identity(A.rows()), to_sparse(A), B, C);
}

// Dense (A, B) with E folded in: returns E^{-1}A and E^{-1}B.
inline std::pair<Mat, Mat> dense_standard_form(const StateSpaceSystem& sys) {
  if (sys.e_identity) return {sys.dense_A(), sys.B};
  Eigen::PartialPivLU<Mat> lu(sys.dense_E());
  return {lu.solve(sys.dense_A()), lu.solve(sys.B)};
}

}  // namespace phred
