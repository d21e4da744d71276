// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/balancing/lyapunov.hpp"
#include "phred/irka/modal.hpp"
#include "phred/reduction/ph_reduce.hpp"

#include <memory>

namespace phred {

struct IrkaOptions {
  int max_iterations = 100;
  double shift_tolerance = 1e-6;
  int stagnation_window = 5;
  unsigned jobs = 1;  // threads for the shifted solves of one iteration
};

struct IrkaIteration {
  std::vector<cplx> shifts;       // interpolation points used by this iterate
  std::vector<CVec> directions;   // right tangent directions used
  std::vector<CVec> left_directions;  // irka_general only
  std::vector<cplx> poles;        // poles of the resulting reduced model
  double change = 0.0;            // relative change from shifts to -poles
  double abscissa = 0.0;
  double h2_offset = std::numeric_limits<double>::quiet_NaN();  // |G-G_r|^2 - |G|^2
};

struct IrkaTrace {
  std::vector<IrkaIteration> iterations;
  ModalData final_modal;
  Mat basis;  // orthonormal V of the returned model
  InterpolationData final_data;
  bool converged = false;
  std::string stop_reason;
  std::vector<std::string> events;
};

// Carries the trace and the best iterate by estimated H2 error. Only one of
// best_ph / best_ss is set, depending on the algorithm.
class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(const std::string& what, std::shared_ptr<const IrkaTrace> trace, int best_iteration,
                        std::shared_ptr<const PortHamiltonianSystem> best_ph,
                        std::shared_ptr<const StateSpaceSystem> best_ss)
      : Error(what), trace_(std::move(trace)), best_(best_iteration), ph_(std::move(best_ph)), ss_(std::move(best_ss)) {}
  const char* name() const noexcept override { return "MaxIterationsExceeded"; }
  const IrkaTrace& trace() const { return *trace_; }
  int best_iteration() const { return best_; }
  const PortHamiltonianSystem* best_ph() const { return ph_.get(); }
  const StateSpaceSystem* best_ss() const { return ss_.get(); }

 private:
  std::shared_ptr<const IrkaTrace> trace_;
  int best_;
  std::shared_ptr<const PortHamiltonianSystem> ph_;
  std::shared_ptr<const StateSpaceSystem> ss_;
};

template <class Model>
struct IrkaResult {
  Model model;
  IrkaTrace trace;
};

// max_i |s_new - s_old| / |s_old| after greedy nearest matching of the
// canonically sorted sets
inline double shift_change(const std::vector<cplx>& old_shifts, std::vector<cplx> new_shifts) {
  std::sort(new_shifts.begin(), new_shifts.end(), canonical_less);
  std::vector<cplx> pool = old_shifts;
  std::sort(pool.begin(), pool.end(), canonical_less);
  std::vector<bool> used(pool.size(), false);
  double worst = 0.0;
  for (cplx z : new_shifts) {
    std::size_t best = pool.size();
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (!used[j] && std::abs(pool[j] - z) < d) d = std::abs(pool[j] - z), best = j;
    if (best == pool.size()) return std::numeric_limits<double>::infinity();
    used[best] = true;
    worst = std::max(worst, d / std::max(DBL_MIN, std::abs(pool[best])));
  }
  return worst;
}

namespace detail {

inline CVec phase_fixed(CVec v) { return normalize_direction(std::move(v)); }

// scales every interpolation point by (1 + eps), preserving conjugate closure
inline InterpolationData perturbed(const InterpolationData& d, double eps) {
  InterpolationData out = d;
  for (auto& p : out.points) p *= (1.0 + eps);
  return out;
}

inline InterpolationData perturbed_point(const InterpolationData& d, Index i, double eps) {
  InterpolationData out = d;
  out.points[i] *= (1.0 + eps);
  out.points[d.partner[i]] = std::conj(out.points[i]);
  return out;
}

// |G_r|_H2^2, infinite for unstable models
inline double reduced_h2_squared(const Mat& A, const Mat& B, const Mat& C) {
  try {
    Mat P = solve_lyapunov(A, B * B.transpose());
    return std::max(0.0, (C * P * C.transpose()).trace());
  } catch (const UnstableMatrix&) {
    return std::numeric_limits<double>::infinity();
  }
}

// |G - G_r|^2 - |G|^2 = |G_r|^2 - 2 sum_k c_k^T G(-lambda_k) b_k. gv holds
// G(-lambda_k) d_k per pole, d_k the unit direction actually used for the
// next basis (so b_k = (d_k^* b_k) d_k).
inline double h2_offset(double gr2, const ModalData& md, const CMat& gv, const std::vector<CVec>& dirs) {
  cplx cross = 0.0;
  for (Index k = 0; k < md.poles.size(); ++k) {
    cplx alpha = dirs[k].dot(md.F.row(k).transpose());
    cross += (md.Cres.col(k).transpose() * gv.col(k))(0, 0) * alpha;
  }
  return gr2 - 2.0 * cross.real();
}

inline bool stagnating(const std::vector<IrkaIteration>& its, int window, double tol) {
  if (window < 2 || static_cast<int>(its.size()) < window) return false;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = its.size() - window; k < its.size(); ++k) {
    lo = std::min(lo, its[k].change);
    hi = std::max(hi, its[k].change);
  }
  return lo >= tol && (hi - lo) < 0.1 * hi;
}

// shifted solves with collision handling: a point that hits a pole of the
// full system is nudged by 1e-8 relative (and the event recorded)
inline ShiftedColumns robust_columns(const StateSpaceSystem& sys, InterpolationData& data,
                                     std::vector<CVec>* cdirs, unsigned jobs, std::vector<std::string>& events,
                                     int iteration) {
  for (int attempt = 0;; ++attempt) {
    try {
      return shifted_columns(sys, data, cdirs, jobs);
    } catch (const SingularPencil& e) {
      if (e.index() < 0 || attempt >= 5) throw;
      events.push_back("iteration " + std::to_string(iteration) + ": shift " + fmt_complex(data.points[e.index()]) +
                       " collides with a pole of the full model, perturbed by 1e-8");
      data = perturbed_point(data, e.index(), 1e-8);
    }
  }
}

inline void check_options(const IrkaOptions& o) {
  if (o.max_iterations < 1) throw BadParams("max_iterations must be >= 1");
  if (!(o.shift_tolerance > 0.0)) throw BadParams("shift_tolerance must be positive");
}

}  // namespace detail

// IRKA for port-Hamiltonian systems: project with V from the current shifts
// and W = Q V (V^T Q V)^{-1}, then reflect the reduced poles and take the
// new directions from the residues.
inline IrkaResult<PortHamiltonianSystem> irka_ph(const PortHamiltonianSystem& ph, const InterpolationData& init,
                                                 const IrkaOptions& opts = {}) {
  detail::check_options(opts);
  const StateSpaceSystem sys = ph_to_state_space(ph);
  auto trace = std::make_shared<IrkaTrace>();
  std::vector<PortHamiltonianSystem> models;
  std::vector<double> gr2;
  std::vector<ModalData> modal;
  InterpolationData data = init;
  bool retried = false;

  auto finish_offset = [&](const ShiftedColumns& cols, const std::vector<CVec>& dirs_used) {
    // the columns at -poles of the previous iterate give its H2 offset
    if (models.empty()) return;
    trace->iterations.back().h2_offset =
        detail::h2_offset(gr2.back(), modal.back(), sys.C.cast<cplx>() * cols.right, dirs_used);
  };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    ShiftedColumns cols = detail::robust_columns(sys, data, nullptr, opts.jobs, trace->events, it);
    if (!models.empty()) finish_offset(cols, data.directions);
    double vcond = 1.0;
    Mat V = realify_columns(cols.right, data, std::vector<int>(static_cast<std::size_t>(data.size()), 1), &vcond,
                            false);
    if (!(vcond < 1.0 / kRankTol)) trace->events.push_back("iteration " + std::to_string(it) + ": " + rank_warning(vcond));
    PhProjection proj = ph_project(ph, V);
    for (auto& w : proj.warnings) trace->events.push_back("iteration " + std::to_string(it) + ": " + w);
    const PortHamiltonianSystem& red = proj.reduced;
    Mat Ar = Mat(red.J - red.R) * Mat(red.Q);
    Mat Cr = (Mat(red.Q) * red.B).transpose();
    ModalData md = modal_decomposition(Ar, red.B, Cr);
    if (md.cond_X > 1e12) {
      if (retried)
        throw DefectiveEigenproblem("reduced system matrix is numerically defective (eigenvector condition " +
                                    std::to_string(md.cond_X) + ")");
      retried = true;
      trace->events.push_back("iteration " + std::to_string(it) + ": defective reduced eigenproblem, shifts perturbed");
      data = detail::perturbed(data, 1e-8);
      --it;
      continue;
    }
    retried = false;
    IrkaIteration rec;
    rec.shifts = data.points;
    rec.directions = data.directions;
    std::vector<cplx> next(md.poles.data(), md.poles.data() + md.poles.size());
    for (auto& z : next) z = -z;
    rec.poles.assign(md.poles.data(), md.poles.data() + md.poles.size());
    rec.abscissa = -std::numeric_limits<double>::infinity();
    for (auto z : rec.poles) rec.abscissa = std::max(rec.abscissa, z.real());
    rec.change = shift_change(data.points, next);
    trace->iterations.push_back(rec);
    gr2.push_back(detail::reduced_h2_squared(Ar, red.B, Cr));
    models.push_back(red);
    modal.push_back(md);

    if (rec.change < opts.shift_tolerance) {
      trace->converged = true;
      trace->stop_reason = "converged";
      trace->final_modal = md;
      trace->basis = V;
      trace->final_data = data;
      return {red, std::move(*trace)};
    }
    std::vector<CVec> dirs;
    for (Index k = 0; k < md.F.rows(); ++k) dirs.push_back(md.F.row(k).transpose());
    InterpolationData upd = make_interpolation_data(next, dirs, Closure::enforce);
    const bool stag = detail::stagnating(trace->iterations, opts.stagnation_window, opts.shift_tolerance);
    if (stag || it == opts.max_iterations) {
      // estimate the offset of the last iterate too, then pick the best
      try {
        ShiftedColumns tail = detail::robust_columns(sys, upd, nullptr, opts.jobs, trace->events, it + 1);
        finish_offset(tail, upd.directions);
      } catch (const Error&) {
      }
      int best = 0;
      for (std::size_t k = 0; k < trace->iterations.size(); ++k) {
        double v = trace->iterations[k].h2_offset;
        double b = trace->iterations[best].h2_offset;
        if (std::isfinite(v) && (!std::isfinite(b) || v < b)) best = static_cast<int>(k);
      }
      trace->stop_reason = stag ? "stagnation" : "max_iterations";
      trace->final_modal = md;
      trace->basis = V;
      trace->final_data = data;
      auto best_model = std::make_shared<PortHamiltonianSystem>(models[best]);
      std::string msg = std::string("IRKA-PH did not converge (") + trace->stop_reason + ", last shift change " +
                        std::to_string(rec.change) + " after " + std::to_string(it) + " iterations)";
      throw MaxIterationsExceeded(msg, trace, best + 1, best_model, nullptr);
    }
    data = std::move(upd);
  }
  throw NotConverged("unreachable");
}

inline CVec leading_left_singular_vector(const CMat& G) {
  Eigen::JacobiSVD<CMat> svd(G, Eigen::ComputeThinU);
  return svd.matrixU().col(0);
}

// Unstructured bitangential IRKA (two-sided projection).
inline IrkaResult<StateSpaceSystem> irka_general(const StateSpaceSystem& sys, const InterpolationData& init,
                                                 const IrkaOptions& opts = {},
                                                 const std::vector<CVec>* init_left = nullptr) {
  detail::check_options(opts);
  auto trace = std::make_shared<IrkaTrace>();
  InterpolationData data = init;
  std::vector<CVec> cdirs;
  if (init_left) {
    cdirs = *init_left;
  } else {
    for (Index i = 0; i < data.size(); ++i) {
      if (data.partner[i] < i) {
        cdirs.push_back(cdirs[data.partner[i]].conjugate());
        continue;
      }
      CVec c = leading_left_singular_vector(eval_transfer(sys, data.points[i]));
      if (data.is_real(i)) c = CVec(c.real().cast<cplx>());
      cdirs.push_back(detail::phase_fixed(c));
    }
  }
  std::vector<StateSpaceSystem> models;
  std::vector<double> gr2;
  std::vector<ModalData> modal;
  bool retried = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    ShiftedColumns cols = detail::robust_columns(sys, data, &cdirs, opts.jobs, trace->events, it);
    if (!models.empty())
      trace->iterations.back().h2_offset =
          detail::h2_offset(gr2.back(), modal.back(), sys.C.cast<cplx>() * cols.right, data.directions);
    std::vector<int> ones(static_cast<std::size_t>(data.size()), 1);
    double vcond = 1.0, wcond = 1.0;
    Mat V = realify_columns(cols.right, data, ones, &vcond, false);
    Mat W = realify_columns(cols.left, data, ones, &wcond, false);
    if (!(std::max(vcond, wcond) < 1.0 / kRankTol))
      trace->events.push_back("iteration " + std::to_string(it) + ": " + rank_warning(std::max(vcond, wcond)));
    StateSpaceSystem red = petrov_galerkin_reduce(sys, V, W);
    Mat Er = red.dense_E();
    ModalData md = modal_decomposition(red.dense_A(), red.B, red.C, &Er);
    if (md.cond_X > 1e12) {
      if (retried)
        throw DefectiveEigenproblem("reduced system matrix is numerically defective (eigenvector condition " +
                                    std::to_string(md.cond_X) + ")");
      retried = true;
      trace->events.push_back("iteration " + std::to_string(it) + ": defective reduced eigenproblem, shifts perturbed");
      data = detail::perturbed(data, 1e-8);
      --it;
      continue;
    }
    retried = false;
    IrkaIteration rec;
    rec.shifts = data.points;
    rec.directions = data.directions;
    rec.left_directions = cdirs;
    rec.poles.assign(md.poles.data(), md.poles.data() + md.poles.size());
    rec.abscissa = -std::numeric_limits<double>::infinity();
    for (auto z : rec.poles) rec.abscissa = std::max(rec.abscissa, z.real());
    if (rec.abscissa >= 0.0)
      trace->events.push_back("iteration " + std::to_string(it) + ": UnstableIterate (spectral abscissa " +
                              std::to_string(rec.abscissa) + ")");
    std::vector<cplx> next(rec.poles);
    for (auto& z : next) z = -z;
    rec.change = shift_change(data.points, next);
    trace->iterations.push_back(rec);
    {
      Eigen::PartialPivLU<Mat> lu(Er);
      gr2.push_back(detail::reduced_h2_squared(lu.solve(red.dense_A()), lu.solve(red.B), red.C));
    }
    models.push_back(red);
    modal.push_back(md);
    if (rec.change < opts.shift_tolerance) {
      trace->converged = true;
      trace->stop_reason = "converged";
      trace->final_modal = md;
      trace->basis = V;
      trace->final_data = data;
      return {red, std::move(*trace)};
    }
    std::vector<CVec> bd, cd;
    for (Index k = 0; k < md.F.rows(); ++k) {
      bd.push_back(md.F.row(k).transpose());
      cd.push_back(md.Cres.col(k));
    }
    InterpolationData upd = make_interpolation_data(next, bd, Closure::enforce);
    std::vector<CVec> cupd(cd.size());
    for (Index i = 0; i < upd.size(); ++i) {
      const Index j = upd.partner[i];
      if (j < i) continue;
      CVec c = detail::phase_fixed(cd[i]);
      if (j == i) c = detail::phase_fixed(CVec(c.real().cast<cplx>()));
      cupd[i] = c;
      if (j != i) cupd[j] = c.conjugate();
    }
    const bool stag = detail::stagnating(trace->iterations, opts.stagnation_window, opts.shift_tolerance);
    if (stag || it == opts.max_iterations) {
      try {
        ShiftedColumns tail = detail::robust_columns(sys, upd, nullptr, opts.jobs, trace->events, it + 1);
        trace->iterations.back().h2_offset =
            detail::h2_offset(gr2.back(), modal.back(), sys.C.cast<cplx>() * tail.right, upd.directions);
      } catch (const Error&) {
      }
      int best = 0;
      for (std::size_t k = 0; k < trace->iterations.size(); ++k) {
        double v = trace->iterations[k].h2_offset;
        double b = trace->iterations[best].h2_offset;
        if (std::isfinite(v) && (!std::isfinite(b) || v < b)) best = static_cast<int>(k);
      }
      trace->stop_reason = stag ? "stagnation" : "max_iterations";
      trace->final_modal = md;
      trace->basis = V;
      trace->final_data = data;
      std::string msg = std::string("IRKA did not converge (") + trace->stop_reason + ", last shift change " +
                        std::to_string(rec.change) + " after " + std::to_string(it) + " iterations)";
      throw MaxIterationsExceeded(msg, trace, best + 1, nullptr, std::make_shared<StateSpaceSystem>(models[best]));
    }
    data = std::move(upd);
    cdirs = std::move(cupd);
  }
  throw NotConverged("unreachable");
}

}  // namespace phred
