// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/irka/irka.hpp"

namespace phred {

struct OptimalityResiduals {
  std::vector<double> res_b;  // right tangential:  G(-l_k) b_k = G_r(-l_k) b_k
  std::vector<double> res_c;  // left tangential:   c_k^T G(-l_k) = c_k^T G_r(-l_k)
  std::vector<double> res_h;  // bitangential Hermite: c_k^T G'(-l_k) b_k
};

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

inline void check_distinct_poles(const CVec& poles) {
  double scale = 0.0;
  for (Index i = 0; i < poles.size(); ++i) scale = std::max(scale, std::abs(poles(i)));
  for (Index i = 0; i < poles.size(); ++i)
    for (Index j = i + 1; j < poles.size(); ++j)
      if (std::abs(poles(i) - poles(j)) <= 1e-10 * scale)
        throw RepeatedPoles("reduced model has repeated poles near " + fmt_complex(poles(i)));
}

inline OptimalityResiduals h2_optimality_residuals(const StateSpaceSystem& full, const StateSpaceSystem& reduced) {
  if (full.m() != reduced.m() || full.p() != reduced.p())
    throw DimensionMismatch("full and reduced systems have different port counts");
  ModalData md = modal_decomposition(reduced);
  check_distinct_poles(md.poles);
  OptimalityResiduals out;
  const CMat Bf = full.B.cast<cplx>(), Cf = full.C.cast<cplx>();
  const CMat Br = reduced.B.cast<cplx>(), Cr = reduced.C.cast<cplx>();
  auto both = [](const StateSpaceSystem& sys, cplx s, const CMat& B, const CMat& C, CMat& G, CMat& dG) {
    ShiftedSolver lu(sys.E, sys.A, s, sys.e_identity);
    CMat X = lu.solve(B);
    G = C * X;
    CMat EX = sys.e_identity ? X : CMat(sys.E.cast<cplx>() * X);
    dG = -(C * lu.solve(EX));
  };
  for (Index k = 0; k < md.poles.size(); ++k) {
    const cplx s = -md.poles(k);
    const CVec b = md.F.row(k).transpose();
    const CVec c = md.Cres.col(k);
    CMat G, dG, Gr, dGr;
    both(full, s, Bf, Cf, G, dG);
    both(reduced, s, Br, Cr, Gr, dGr);
    CVec gb = G * b;
    CVec lc = (c.transpose() * G).transpose();
    cplx h = (c.transpose() * dG * b)(0, 0);
    out.res_b.push_back((gb - Gr * b).norm() / std::max(DBL_MIN, gb.norm()));
    out.res_c.push_back((lc - (c.transpose() * Gr).transpose()).norm() / std::max(DBL_MIN, lc.norm()));
    out.res_h.push_back(std::abs(h - (c.transpose() * dGr * b)(0, 0)) / std::max(DBL_MIN, std::abs(h)));
  }
  return out;
}

struct StabilityCertificate {
  double sylvester_residual;  // |A V + V L + B F^T| / |B F^T|
  double lyapunov_residual;   // |A_r K + K A_r^T + B_r B_r^T| / |B_r B_r^T|
  double spectral_abscissa;
  double cond_K;
};

// Rebuilds the primitive basis V (columns (-l_i I - A)^{-1} B f_i) from the
// final modal data, checks the Sylvester identity it satisfies, and the
// reduced Lyapunov identity with K = M^{-1} X^T, V_hat = V M.
inline StabilityCertificate stability_certificate(const PortHamiltonianSystem& ph, const IrkaTrace& trace,
                                                  const Mat& Vhat) {
  if (!trace.converged) throw NotConverged("stability certificate needs a converged IRKA-PH trace");
  const ModalData& md = trace.final_modal;
  const Index r = md.poles.size();
  if (Vhat.rows() != ph.n() || Vhat.cols() != r) throw DimensionMismatch("basis does not match the trace");
  const StateSpaceSystem sys = ph_to_state_space(ph);
  std::vector<cplx> pts(md.poles.data(), md.poles.data() + r);
  for (auto& z : pts) z = -z;
  std::vector<CVec> dirs;
  for (Index k = 0; k < r; ++k) dirs.push_back(md.F.row(k).transpose());
  // unit directions for the data container; the scale is restored below
  InterpolationData data = make_interpolation_data(pts, dirs, Closure::enforce);
  CMat V = shifted_columns(sys, data).right;
  CMat Fm(ph.m(), r);
  for (Index k = 0; k < r; ++k) {
    cplx alpha = data.directions[k].dot(dirs[k]);
    V.col(k) *= alpha;
    Fm.col(k) = data.directions[k] * alpha;
  }
  CMat AV = sys.A.cast<cplx>() * V;
  CMat BF = sys.B.cast<cplx>() * Fm;
  CMat VL = V * md.poles.asDiagonal();
  StabilityCertificate cert{};
  cert.sylvester_residual = (AV + VL + BF).norm() / std::max(DBL_MIN, BF.norm());

  PhProjection proj = ph_project(ph, Vhat);
  const PortHamiltonianSystem& red = proj.reduced;
  Mat Ar = Mat(red.J - red.R) * Mat(red.Q);
  // M = V^+ V_hat via least squares
  CMat M = V.colPivHouseholderQr().solve(Vhat.cast<cplx>());
  CMat K = M.partialPivLu().solve(md.X.transpose());
  CMat BB = (red.B * red.B.transpose()).cast<cplx>();
  CMat L = Ar.cast<cplx>() * K + K * Ar.transpose().cast<cplx>() + BB;
  cert.lyapunov_residual = L.norm() / std::max(DBL_MIN, BB.norm());
  cert.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < r; ++k) cert.spectral_abscissa = std::max(cert.spectral_abscissa, md.poles(k).real());
  cert.cond_K = cond2(K);
  return cert;
}

// Largest principal angle between span{(l_i I + (J-R)Q)^{-1} B b_i} and
// span{(l_i I + (J-R)^T Q)^{-1} B c_i}, l_i and (b_i, c_i) the reduced
// model's poles and residue directions.
inline double range_condition_check(const PortHamiltonianSystem& ph, const StateSpaceSystem& reduced) {
  ModalData md = modal_decomposition(reduced);
  check_distinct_poles(md.poles);
  const Index r = md.poles.size();
  std::vector<cplx> pts(md.poles.data(), md.poles.data() + r);
  for (auto& z : pts) z = -z;
  std::vector<CVec> bd, cd;
  for (Index k = 0; k < r; ++k) {
    bd.push_back(md.F.row(k).transpose());
    cd.push_back(md.Cres.col(k));
  }
  if (reduced.m() != ph.m() || reduced.p() != ph.m()) throw DimensionMismatch("port counts differ");
  InterpolationData db = make_interpolation_data(pts, bd, Closure::enforce);
  InterpolationData dc = make_interpolation_data(pts, cd, Closure::enforce);
  const SpMat JR = ph.J - ph.R;
  StateSpaceSystem s1 = make_state_space(identity(ph.n()), SpMat(JR * ph.Q), ph.B, Mat(ph.B.transpose()));
  StateSpaceSystem s2 = make_state_space(identity(ph.n()), SpMat(SpMat(JR.transpose()) * ph.Q), ph.B,
                                         Mat(ph.B.transpose()));
  // (l I + A) = -(s I - A) at s = -l; the sign does not change the span
  std::vector<int> ones(static_cast<std::size_t>(r), 1);
  Mat Q1 = realify_columns(shifted_columns(s1, db).right, db, ones);
  Mat Q2 = realify_columns(shifted_columns(s2, dc).right, dc, ones);
  return std::max(largest_principal_angle(Q1, Q2), largest_principal_angle(Q2, Q1));
}

}  // namespace phred
