// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/balancing/lyapunov.hpp"
#include "phred/core/port_hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace phred {

// Square-root balancing of a stable standard-form realization. The state
// transform is x_b = T x with T G_c T^T = T^{-T} G_o T^{-1} = diag(sigma).
// Rows of T and columns of T^{-1} are stored only up to the numerical rank,
// so leading blocks stay usable when the Hankel values decay steeply.
struct BalancingData {
  Vec hankel_values;          // descending, all n values
  Index rank = 0;             // values above 1e-14 sigma_1 (and > 0)
  Mat T_rows;                 // rank x n: Sigma^{-1/2} U^T Lo^T
  Mat Tinv_cols;              // n x rank: Lc V Sigma^{-1/2}
  Mat Gc, Go;
  std::vector<std::string> warnings;

  // full transform, present only when the realization is numerically minimal
  std::optional<Mat> T() const {
    if (rank != hankel_values.size()) return std::nullopt;
    return T_rows;
  }
  std::optional<Mat> T_inv() const {
    if (rank != hankel_values.size()) return std::nullopt;
    return Tinv_cols;
  }
};

inline constexpr double kNonMinimalRatio = 1e-14;

namespace detail {

inline Mat gramian_factor(const Mat& P) {
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

inline void require_dense_size(Index n, const char* what) {
  if (n > dense_ceiling())
    throw SizeLimitExceeded(std::string(what) + " needs dense O(n^3) algebra; n = " + std::to_string(n) +
                            " exceeds the ceiling " + std::to_string(dense_ceiling()));
}

}  // namespace detail

inline BalancingData balancing_transformation(const StateSpaceSystem& sys) {
  detail::require_dense_size(sys.n(), "balancing");
  auto [A, B] = dense_standard_form(sys);
  const Mat& C = sys.C;
  BalancingData bd;
  bd.Gc = solve_lyapunov(A, B * B.transpose());
  bd.Go = solve_lyapunov(A.transpose(), C.transpose() * C);
  Mat Lc = detail::gramian_factor(bd.Gc);
  Mat Lo = detail::gramian_factor(bd.Go);
  Eigen::JacobiSVD<Mat> svd(Lo.transpose() * Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  bd.hankel_values = svd.singularValues();
  const Index n = A.rows();
  const double s1 = bd.hankel_values(0);
  bd.rank = 0;
  while (bd.rank < n && bd.hankel_values(bd.rank) > kNonMinimalRatio * s1) ++bd.rank;
  if (bd.rank < n)
    bd.warnings.push_back("NearNonMinimal: sigma_n/sigma_1 = " + std::to_string(bd.hankel_values(n - 1) / s1) +
                          ", numerical rank " + std::to_string(bd.rank));
  const Index k = bd.rank;
  Vec isq = bd.hankel_values.head(k).cwiseSqrt().cwiseInverse();
  bd.T_rows = isq.asDiagonal() * svd.matrixU().leftCols(k).transpose() * Lo.transpose();
  bd.Tinv_cols = Lc * svd.matrixV().leftCols(k) * isq.asDiagonal();
  return bd;
}

struct TruncationInfo {
  Index order = 0;  // order actually used (clamped to the numerical rank)
  std::vector<std::string> warnings;
};

namespace detail {

inline Index truncation_order(const BalancingData& bd, Index r, Index n, TruncationInfo* info) {
  if (r < 1 || r > n) throw BadParams("truncation order must be in [1, n]");
  std::vector<std::string> w = bd.warnings;
  Index use = r;
  if (r > bd.rank) {
    use = bd.rank;
    w.push_back("NearNonMinimal: order " + std::to_string(r) + " truncated to numerical rank " +
                std::to_string(bd.rank));
  } else if (bd.hankel_values(r - 1) < 1e-12 * bd.hankel_values(0)) {
    w.push_back("NearNonMinimal: sigma_r/sigma_1 = " +
                std::to_string(bd.hankel_values(r - 1) / bd.hankel_values(0)));
  }
  if (info) *info = TruncationInfo{use, w};
  return use;
}

}  // namespace detail

// Regular balanced truncation. The result is generally not port-Hamiltonian.
inline StateSpaceSystem balanced_truncation(const StateSpaceSystem& sys, Index r, TruncationInfo* info = nullptr) {
  BalancingData bd = balancing_transformation(sys);
  const Index k = detail::truncation_order(bd, r, sys.n(), info);
  auto [A, B] = dense_standard_form(sys);
  Mat T1 = bd.T_rows.topRows(k);
  Mat Ti1 = bd.Tinv_cols.leftCols(k);
  return make_state_space(Mat(T1 * A * Ti1), Mat(T1 * B), Mat(sys.C * Ti1));
}

// Schur complement Q11 - Q12 Q22^{-1} Q21 of the leading r x r block.
inline Mat schur_complement(const Mat& Q, Index r) {
  const Index n = Q.rows();
  if (r < 1 || r > n) throw BadParams("Schur block size must be in [1, n]");
  if (r == n) return Q;
  Mat Q11 = Q.topLeftCorner(r, r), Q12 = Q.topRightCorner(r, n - r), Q22 = Q.bottomRightCorner(n - r, n - r);
  Eigen::LDLT<Mat> ldlt(Q22);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-14 * std::max(1.0, Q22.norm())))
    throw SingularSchurBlock("Q22 block is not positive definite");
  Mat S = Q11 - Q12 * ldlt.solve(Q12.transpose());
  return 0.5 * (S + S.transpose());
}

// Effort-constraint reduction: balance the PH realization, keep J_b11,
// R_b11, B_b1 and replace Q_b11 by the Schur complement of Q_b. The
// complement is evaluated as ((Q_b^{-1})_11)^{-1} = (T1 Q^{-1} T1^T)^{-1},
// which needs only the leading rows T1 of the balancing transform.
inline PortHamiltonianSystem effort_constraint_reduce(const PortHamiltonianSystem& ph, Index r,
                                                      TruncationInfo* info = nullptr) {
  const StateSpaceSystem sys = ph_to_state_space(ph);
  BalancingData bd = balancing_transformation(sys);
  const Index k = detail::truncation_order(bd, r, sys.n(), info);
  Mat T1 = bd.T_rows.topRows(k);
  Mat Q(ph.Q);
  Eigen::LLT<Mat> lq(Q);
  if (lq.info() != Eigen::Success) throw StructureViolation(StructureKind::pd, "Q is not positive definite");
  Mat Sinv = T1 * lq.solve(Mat(T1.transpose()));
  Sinv = 0.5 * (Sinv + Sinv.transpose()).eval();
  Eigen::LLT<Mat> ls(Sinv);
  if (ls.info() != Eigen::Success) throw SingularSchurBlock("Schur complement of the balanced energy matrix is singular");
  Mat S = ls.solve(Mat::Identity(k, k));
  Mat J11 = T1 * ph.J * T1.transpose();
  Mat R11 = T1 * ph.R * T1.transpose();
  Mat B1 = T1 * ph.B;
  return build_ph(Mat(0.5 * (J11 - J11.transpose())), Mat(0.5 * (R11 + R11.transpose())), Mat(0.5 * (S + S.transpose())),
                  B1);
}

}  // namespace phred
