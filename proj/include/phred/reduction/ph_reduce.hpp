// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"
#include "phred/core/transfer.hpp"
#include "phred/reduction/tangential.hpp"

#include <cfloat>
#include <string>
#include <vector>

namespace phred {

struct PhProjection {
  PortHamiltonianSystem reduced;
  Mat V;  // orthonormal real basis
  Mat W;  // Q V (V^T Q V)^{-1}
  double cond_Qr = 1.0;
  std::vector<std::string> warnings;
};

inline constexpr double kQrWarn = 1e12;
inline constexpr double kQrFail = 1e14;

// Structure-preserving projection onto range(V): W = Q V (V^T Q V)^{-1},
// J_r = W^T J W, R_r = W^T R W, Q_r = V^T Q V, B_r = W^T B.
inline PhProjection ph_project(const PortHamiltonianSystem& ph, const Mat& V) {
  if (V.rows() != ph.n() || V.cols() == 0) throw DimensionMismatch("basis must be n x r");
  PhProjection out;
  out.V = V;
  Mat QV = ph.Q * V;
  Mat Qr = V.transpose() * QV;
  Qr = 0.5 * (Qr + Qr.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(Qr, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(Qr.rows() - 1);
  out.cond_Qr = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(out.cond_Qr <= kQrFail))
    throw StructureViolation(StructureKind::pd, "reduced energy matrix V^T Q V is too ill-conditioned (cond " +
                                                    std::to_string(out.cond_Qr) + ")");
  if (out.cond_Qr > kQrWarn)
    out.warnings.push_back("reduced energy matrix condition " + std::to_string(out.cond_Qr) + " exceeds 1e12");
  Eigen::LLT<Mat> llt(Qr);
  if (llt.info() != Eigen::Success)
    throw StructureViolation(StructureKind::pd, "reduced energy matrix V^T Q V is not positive definite");
  out.W = llt.solve(QV.transpose()).transpose();
  Mat Jr = out.W.transpose() * (ph.J * out.W);
  Mat Rr = out.W.transpose() * (ph.R * out.W);
  Mat Br = out.W.transpose() * ph.B;
  out.reduced = build_ph(Jr, Rr, Qr, Br);
  return out;
}

struct ReduceOptions {
  // accept a numerically rank-deficient interpolation basis (warning instead
  // of RankDeficient); the extra columns then carry no interpolation data
  bool allow_rank_deficient = false;
  unsigned jobs = 1;
};

inline std::string rank_warning(double cond) {
  return "interpolation basis is numerically rank deficient (condition " + std::to_string(cond) +
         "); completed by pivoted QR";
}

inline PhProjection ph_structure_reduce_detailed(const PortHamiltonianSystem& ph, const InterpolationData& data,
                                                 const ReduceOptions& opt = {}) {
  StateSpaceSystem sys = ph_to_state_space(ph);
  TangentialBasis basis = tangential_basis(sys, data, opt.jobs);
  double cond = 1.0;
  Mat V = realify_columns(basis.columns, basis.data, basis.hermite_orders, &cond, !opt.allow_rank_deficient);
  PhProjection out = ph_project(ph, V);
  if (!(cond < 1.0 / kRankTol)) out.warnings.insert(out.warnings.begin(), rank_warning(cond));
  return out;
}

inline PortHamiltonianSystem ph_structure_reduce(const PortHamiltonianSystem& ph, const InterpolationData& data) {
  return ph_structure_reduce_detailed(ph, data).reduced;
}

// |G(s_i) b_i - G_r(s_i) b_i| / |G(s_i) b_i| per point
inline std::vector<double> interpolation_residuals(const StateSpaceSystem& full, const StateSpaceSystem& reduced,
                                                   const InterpolationData& data) {
  if (full.m() != reduced.m() || full.p() != reduced.p())
    throw DimensionMismatch("full and reduced systems have different port counts");
  std::vector<double> res;
  for (Index i = 0; i < data.size(); ++i) {
    const CVec b = data.directions[i];
    ShiftedSolver lf(full.E, full.A, data.points[i], full.e_identity);
    ShiftedSolver lr(reduced.E, reduced.A, data.points[i], reduced.e_identity);
    CVec g = full.C.cast<cplx>() * lf.solve(full.B.cast<cplx>() * b);
    CVec gr = reduced.C.cast<cplx>() * lr.solve(reduced.B.cast<cplx>() * b);
    res.push_back((g - gr).norm() / std::max(DBL_MIN, g.norm()));
  }
  return res;
}

}  // namespace phred
