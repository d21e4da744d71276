// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/state_space.hpp"

namespace phred {

inline constexpr double kSkewTol = 1e-12;

// x' = (J - R) Q x + B u, y = B^T Q x. Build through build_ph.
struct PortHamiltonianSystem {
  SpMat J, R, Q;
  Mat B;

  Index n() const { return J.rows(); }
  Index m() const { return B.cols(); }
};

namespace detail {

inline double fro(const SpMat& m) { return m.norm(); }

}  // namespace detail

inline PortHamiltonianSystem build_ph(SpMat J, SpMat R, SpMat Q, Mat B) {
  const Index n = J.rows();
  if (n == 0 || J.cols() != n || R.rows() != n || R.cols() != n || Q.rows() != n || Q.cols() != n ||
      B.rows() != n || B.cols() == 0)
    throw StructureViolation(StructureKind::dimension, "J, R, Q must be n x n and B n x m");
  if (!all_finite(J) || !all_finite(R) || !all_finite(Q) || !all_finite(B))
    throw StructureViolation(StructureKind::finiteness, "non-finite entries");

  SpMat Jt = J.transpose();
  SpMat Rt = R.transpose();
  SpMat Qt = Q.transpose();
  double jdev = detail::fro(J + Jt), rdev = detail::fro(R - Rt), qdev = detail::fro(Q - Qt);
  if (jdev > kSkewTol * std::max(1.0, detail::fro(J)))
    throw StructureViolation(StructureKind::skewness, "J + J^T is not zero within tolerance");
  if (rdev > kSkewTol * std::max(1.0, detail::fro(R)))
    throw StructureViolation(StructureKind::skewness, "R is not symmetric within tolerance");
  if (qdev > kSkewTol * std::max(1.0, detail::fro(Q)))
    throw StructureViolation(StructureKind::skewness, "Q is not symmetric within tolerance");

  // project onto the exact skew / symmetric parts
  SpMat Js = 0.5 * (J - Jt), Rs = 0.5 * (R + Rt), Qs = 0.5 * (Q + Qt);
  Js.prune(0.0);
  Rs.prune(0.0);
  Qs.prune(0.0);

  const double rnorm = sym_norm2(Rs);
  if (rnorm > 0.0) {
    // lambda_min(R) >= -1e-10 max(1,|R|) iff R + delta I is positive semidefinite
    const double delta = 1e-10 * std::max(1.0, rnorm);
    SpMat shifted = Rs + delta * identity(n);
    auto piv = min_ldlt_pivot(shifted);
    if (!piv || *piv < 0.0) throw StructureViolation(StructureKind::psd, "R is not positive semidefinite");
  }

  const double qnorm = sym_norm2(Qs);
  auto qpiv = min_ldlt_pivot(Qs);
  if (!(qnorm > 0.0) || !qpiv || !(*qpiv > 1e-12 * qnorm))
    throw StructureViolation(StructureKind::pd, "Q is not positive definite");

  Js.makeCompressed();
  Rs.makeCompressed();
  Qs.makeCompressed();
  return PortHamiltonianSystem{std::move(Js), std::move(Rs), std::move(Qs), std::move(B)};
}

inline PortHamiltonianSystem build_ph(const Mat& J, const Mat& R, const Mat& Q, const Mat& B) {
  return build_ph(to_sparse(J), to_sparse(R), to_sparse(Q), B);
}

inline StateSpaceSystem ph_to_state_space(const PortHamiltonianSystem& ph) {
  SpMat A = (ph.J - ph.R) * ph.Q;
  Mat C = (ph.Q * ph.B).transpose();  // B^T Q, Q symmetric
  return make_state_space(identity(ph.n()), A, ph.B, C);
}

// Co-energy coordinates e = Q x: A = Q (J - R), B = Q B, C = B^T.
inline StateSpaceSystem to_coenergy(const PortHamiltonianSystem& ph) {
  SpMat A = ph.Q * (ph.J - ph.R);
  Mat B = ph.Q * ph.B;
  return make_state_space(identity(ph.n()), A, B, Mat(ph.B.transpose()));
}

struct StateTransform {
  Mat T;
};

inline StateTransform make_state_transform(Mat T) {
  if (T.rows() != T.cols() || T.rows() == 0) throw DimensionMismatch("state transform must be square");
  if (!T.allFinite()) throw SingularTransform("state transform has non-finite entries");
  if (numerically_singular(Eigen::PartialPivLU<Mat>(T))) throw SingularTransform("state transform is singular");
  return StateTransform{std::move(T)};
}

// x~ = T x: J~ = T J T^T, R~ = T R T^T, Q~ = T^{-T} Q T^{-1}, B~ = T B.
inline PortHamiltonianSystem apply_state_transform(const PortHamiltonianSystem& ph, const StateTransform& t) {
  const Mat& T = t.T;
  if (T.rows() != ph.n()) throw DimensionMismatch("state transform size does not match the system");
  Eigen::PartialPivLU<Mat> lu(T);
  if (numerically_singular(lu)) throw SingularTransform("state transform is singular");
  Mat Ji = T * (ph.J * T.transpose());
  Mat Ri = T * (ph.R * T.transpose());
  // T^{-1} as a solve, then Q~ = T^{-T} Q T^{-1}
  Mat Tinv = lu.solve(Mat::Identity(T.rows(), T.cols()));
  Mat Qi = Tinv.transpose() * (ph.Q * Tinv);
  Mat Bi = T * ph.B;
  return build_ph(Mat(0.5 * (Ji - Ji.transpose())), Mat(0.5 * (Ri + Ri.transpose())), Mat(0.5 * (Qi + Qi.transpose())),
                  Bi);
}

struct PowerBalance {
  double H;           // 1/2 x^T Q x
  double supplied;    // u^T y
  double dissipated;  // x^T Q R Q x
};

inline PowerBalance power_balance(const PortHamiltonianSystem& ph, const Vec& x, const Vec& u) {
  if (x.size() != ph.n() || u.size() != ph.m()) throw DimensionMismatch("state or input has the wrong size");
  Vec e = ph.Q * x;
  Vec y = ph.B.transpose() * e;
  return {0.5 * x.dot(e), u.dot(y), e.dot(ph.R * e)};
}

inline Eigen::VectorXcd eigenvalues(const Mat& A) {
  if (A.rows() == 0) return {};
  Eigen::EigenSolver<Mat> es(A, false);
  return es.eigenvalues();
}

inline double spectral_abscissa(const Mat& A) {
  auto ev = eigenvalues(A);
  double m = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) m = std::max(m, ev(i).real());
  return m;
}

inline double spectral_abscissa(const StateSpaceSystem& sys) { return spectral_abscissa(dense_standard_form(sys).first); }

// Structural figures of merit, measured independently of build_ph.
struct StructureReport {
  double skew_J;        // |J + J^T|_F / max(1,|J|_F)
  double sym_R;         // |R - R^T|_F / max(1,|R|_F)
  double sym_Q;
  double lambda_min_R;  // lambda_min(sym R) / max(1,|R|_2); NaN above the dense ceiling
  double lambda_min_Q;  // lambda_min(sym Q) / |Q|_2; NaN above the dense ceiling
  double pivot_min_R;   // smallest LDL^T pivot of sym R + delta I, minus delta, / max(1,|R|_2)
  double pivot_min_Q;   // smallest LDL^T pivot of sym Q / |Q|_2
  double abscissa;      // max Re eig((J-R)Q); NaN above the dense ceiling
  bool dense;           // eigenvalue fields computed
};

// Deviation from the structural invariants. Above the dense ceiling only the
// LDL^T inertia is checked and the eigenvalue fields are NaN.
inline StructureReport structure_report(const PortHamiltonianSystem& ph) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Index n = ph.n();
  StructureReport rep{};
  SpMat Jt = ph.J.transpose(), Rt = ph.R.transpose(), Qt = ph.Q.transpose();
  rep.skew_J = SpMat(ph.J + Jt).norm() / std::max(1.0, ph.J.norm());
  rep.sym_R = SpMat(ph.R - Rt).norm() / std::max(1.0, ph.R.norm());
  rep.sym_Q = SpMat(ph.Q - Qt).norm() / std::max(1.0, ph.Q.norm());
  SpMat Rs = 0.5 * (ph.R + Rt), Qs = 0.5 * (ph.Q + Qt);
  const double rn = std::max(1.0, sym_norm2(Rs));
  const double qn = sym_norm2(Qs);
  const double delta = 1e-10 * rn;
  auto rp = min_ldlt_pivot(SpMat(Rs + delta * identity(n)));
  rep.pivot_min_R = rp ? (*rp - delta) / rn : -std::numeric_limits<double>::infinity();
  auto qp = min_ldlt_pivot(Qs);
  rep.pivot_min_Q = qp && qn > 0.0 ? *qp / qn : -1.0;
  rep.dense = n <= dense_ceiling();
  if (rep.dense) {
    Mat R(Rs), Q(Qs);
    Eigen::SelfAdjointEigenSolver<Mat> er(R, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> eq(Q, Eigen::EigenvaluesOnly);
    rep.lambda_min_R = er.eigenvalues()(0) / rn;
    rep.lambda_min_Q = qn > 0.0 ? eq.eigenvalues()(0) / qn : nan;
    rep.abscissa = spectral_abscissa(Mat(Mat(ph.J - ph.R) * Q));
  } else {
    rep.lambda_min_R = rep.lambda_min_Q = rep.abscissa = nan;
  }
  return rep;
}

inline bool passes_ph_invariants(const StructureReport& r) {
  const double rmin = r.dense ? r.lambda_min_R : r.pivot_min_R;
  return r.skew_J <= kSkewTol && r.sym_R <= kSkewTol && r.sym_Q <= kSkewTol && rmin >= -1e-10 &&
         r.pivot_min_Q > 1e-12;
}

}  // namespace phred
