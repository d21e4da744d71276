// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/interpolation_data.hpp"
#include "phred/core/parallel.hpp"
#include "phred/core/state_space.hpp"

namespace phred {

struct TangentialBasis {
  CMat columns;  // point-major: all columns of point 0, then point 1, ...
  InterpolationData data;
  std::vector<int> hermite_orders;  // columns per point
};

inline constexpr double kRankTol = 1e-12;

struct RealBasis {
  Mat columns;
  double conditioning = 1.0;  // 2-norm condition of the pre-orthonormalization factor
};

namespace detail {

inline CMat pencil_times(const StateSpaceSystem& sys, cplx s, const CMat& x, bool transpose) {
  CMat Ex = sys.e_identity ? x : CMat((transpose ? SpMat(sys.E.transpose()) : sys.E).cast<cplx>() * x);
  CMat Ax = (transpose ? SpMat(sys.A.transpose()) : sys.A).cast<cplx>() * x;
  return s * Ex - Ax;
}

// Solve with the pencil and verify the defining residual, refining twice
// before giving up.
inline CVec verified_solve(const StateSpaceSystem& sys, const ShiftedSolver& lu, const CVec& rhs, bool transpose,
                           Index point) {
  CVec x = transpose ? CVec(lu.solve_transpose(rhs)) : CVec(lu.solve(rhs));
  const double bn = rhs.norm();
  for (int pass = 0;; ++pass) {
    CVec res = rhs - pencil_times(sys, lu.shift(), x, transpose);
    if (res.norm() <= 1e-10 * bn) return x;
    if (pass == 2)
      throw SingularPencil("shifted solve at s = " + fmt_complex(lu.shift()) + " is inaccurate (pencil nearly singular)",
                           static_cast<int>(point));
    x += transpose ? CVec(lu.solve_transpose(res)) : CVec(lu.solve(res));
  }
}

// Krylov chain w_1 = (sE-A)^{-1} rhs, w_k = (sE-A)^{-1} E w_{k-1}
inline CMat chain(const StateSpaceSystem& sys, const ShiftedSolver& lu, const CVec& rhs, int order, bool transpose,
                  Index point) {
  CMat out(sys.n(), order);
  out.col(0) = verified_solve(sys, lu, rhs, transpose, point);
  for (int k = 1; k < order; ++k) {
    CVec prev = out.col(k - 1);
    CVec Ew = sys.e_identity ? prev : CVec((transpose ? SpMat(sys.E.transpose()) : sys.E).cast<cplx>() * prev);
    out.col(k) = verified_solve(sys, lu, Ew, transpose, point);
  }
  return out;
}

inline ShiftedSolver factor_at(const StateSpaceSystem& sys, cplx s, Index point) {
  try {
    return ShiftedSolver(sys.E, sys.A, s, sys.e_identity);
  } catch (const SingularPencil& e) {
    throw SingularPencil(std::string(e.what()) + " (interpolation point " + std::to_string(point) + ")",
                         static_cast<int>(point));
  }
}

}  // namespace detail

// Right columns (s_i E - A)^{-1} B b_i and, when cdirs is given, left
// columns (s_i E - A)^{-T} C^T c_i. One factorization per point; conjugate
// partners reuse the conjugated solution.
struct ShiftedColumns {
  CMat right, left;
};

inline ShiftedColumns shifted_columns(const StateSpaceSystem& sys, const InterpolationData& data,
                                      const std::vector<CVec>* cdirs = nullptr, unsigned jobs = 1) {
  const Index r = data.size();
  if (data.m() != sys.m()) throw DimensionMismatch("tangent directions do not match the number of inputs");
  if (cdirs && (static_cast<Index>(cdirs->size()) != r || (r > 0 && (*cdirs)[0].size() != sys.p())))
    throw DimensionMismatch("left tangent directions do not match the number of outputs");
  ShiftedColumns out{CMat(sys.n(), r), cdirs ? CMat(sys.n(), r) : CMat()};
  std::vector<Index> todo;
  for (Index i = 0; i < r; ++i)
    if (data.partner[i] >= i) todo.push_back(i);
  const CMat Bc = sys.B.cast<cplx>();
  const CMat Ct = sys.C.transpose().cast<cplx>();
  parallel_for(
      todo.size(),
      [&](std::size_t t) {
        const Index i = todo[t];
        ShiftedSolver lu = detail::factor_at(sys, data.points[i], i);
        out.right.col(i) = detail::verified_solve(sys, lu, Bc * data.directions[i], false, i);
        if (cdirs) out.left.col(i) = detail::verified_solve(sys, lu, Ct * (*cdirs)[i], true, i);
      },
      jobs);
  for (Index i = 0; i < r; ++i) {
    const Index j = data.partner[i];
    if (j < i) {
      out.right.col(i) = out.right.col(j).conjugate();
      if (cdirs) out.left.col(i) = out.left.col(j).conjugate();
    }
  }
  return out;
}

inline TangentialBasis tangential_basis(const StateSpaceSystem& sys, const InterpolationData& data, unsigned jobs = 1) {
  return TangentialBasis{shifted_columns(sys, data, nullptr, jobs).right, data,
                         std::vector<int>(static_cast<std::size_t>(data.size()), 1)};
}

inline CMat hermite_extend(const StateSpaceSystem& sys, cplx point, const CVec& direction, int order) {
  if (order < 1) throw BadParams("Hermite order must be >= 1");
  if (direction.size() != sys.m()) throw DimensionMismatch("direction does not match the number of inputs");
  ShiftedSolver lu = detail::factor_at(sys, point, 0);
  return detail::chain(sys, lu, sys.B.cast<cplx>() * direction, order, false, 0);
}

// Basis with orders[i] chained columns at point i (conjugate partners must
// carry the same order).
inline TangentialBasis tangential_basis(const StateSpaceSystem& sys, const InterpolationData& data,
                                        const std::vector<int>& orders) {
  const Index r = data.size();
  if (static_cast<Index>(orders.size()) != r) throw DimensionMismatch("one Hermite order per point is required");
  std::vector<Index> offset(static_cast<std::size_t>(r) + 1, 0);
  for (Index i = 0; i < r; ++i) {
    if (orders[i] < 1) throw BadParams("Hermite order must be >= 1");
    if (orders[data.partner[i]] != orders[i]) throw NotConjugateClosed("conjugate points need equal Hermite orders");
    offset[i + 1] = offset[i] + orders[i];
  }
  CMat cols(sys.n(), offset[r]);
  for (Index i = 0; i < r; ++i) {
    const Index j = data.partner[i];
    if (j < i) {
      cols.middleCols(offset[i], orders[i]) = cols.middleCols(offset[j], orders[j]).conjugate();
      continue;
    }
    ShiftedSolver lu = detail::factor_at(sys, data.points[i], i);
    cols.middleCols(offset[i], orders[i]) =
        detail::chain(sys, lu, sys.B.cast<cplx>() * data.directions[i], orders[i], false, i);
  }
  return TangentialBasis{std::move(cols), data, orders};
}

// Real orthonormal basis with the same range: conjugate column pairs become
// (sqrt2 Re v, sqrt2 Im v), then column-pivoted QR.
inline Mat realify_columns(const CMat& cols, const InterpolationData& data, const std::vector<int>& orders,
                           double* cond_out = nullptr, bool strict = true) {
  const Index r = data.size();
  std::vector<Index> offset(static_cast<std::size_t>(r) + 1, 0);
  for (Index i = 0; i < r; ++i) offset[i + 1] = offset[i] + orders[i];
  if (offset[r] != cols.cols()) throw DimensionMismatch("basis and interpolation data disagree");
  Mat X(cols.rows(), cols.cols());
  Index k = 0;
  const double s2 = std::sqrt(2.0);
  for (Index i = 0; i < r; ++i) {
    const Index j = data.partner[i];
    for (int c = 0; c < orders[i]; ++c) {
      const CVec v = cols.col(offset[i] + c);
      if (j == i) {
        if (v.imag().norm() > 1e-10 * std::max(1.0, v.norm()))
          throw NotConjugateClosed("column for a real point is not real");
        X.col(k++) = v.real();
      } else if (j > i) {
        if ((cols.col(offset[j] + c) - v.conjugate()).norm() > 1e-10 * std::max(1.0, v.norm()))
          throw NotConjugateClosed("columns of conjugate points are not conjugate");
        X.col(k++) = s2 * v.real();
        X.col(k++) = s2 * v.imag();
      }
    }
  }
  for (Index c = 0; c < X.cols(); ++c) {
    double nrm = X.col(c).norm();
    if (!(nrm > 0.0)) throw RankDeficient("basis has a zero column");
    X.col(c) /= nrm;
  }
  return orthonormal_basis(X, kRankTol, cond_out, strict);
}

inline RealBasis realify(const TangentialBasis& basis) {
  RealBasis out;
  out.columns = realify_columns(basis.columns, basis.data, basis.hermite_orders, &out.conditioning);
  return out;
}

inline StateSpaceSystem petrov_galerkin_reduce(const StateSpaceSystem& sys, const Mat& V, const Mat& W) {
  if (V.rows() != sys.n() || W.rows() != sys.n() || V.cols() != W.cols() || V.cols() == 0)
    throw DimensionMismatch("V and W must both be n x r");
  Mat EV = sys.e_identity ? V : Mat(sys.E * V);
  Mat Er = W.transpose() * EV;
  Eigen::PartialPivLU<Mat> lu(Er);
  if (numerically_singular(lu)) throw SingularReducedPencil("W^T E V is singular");
  Mat Ar = W.transpose() * (sys.A * V);
  Mat Br = W.transpose() * sys.B;
  Mat Cr = sys.C * V;
  return make_state_space(Er, Ar, Br, Cr);
}

}  // namespace phred
