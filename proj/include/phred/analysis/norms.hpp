// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/balancing/lyapunov.hpp"
#include "phred/core/parallel.hpp"
#include "phred/core/transfer.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <functional>
#include <string>
#include <vector>

namespace phred {

struct FrequencyGrid {
  Vec omegas;  // rad/s, positive, strictly increasing
};

inline FrequencyGrid make_grid(Vec omegas) {
  if (omegas.size() == 0) throw BadParams("frequency grid is empty");
  for (Index i = 0; i < omegas.size(); ++i) {
    if (!std::isfinite(omegas(i)) || !(omegas(i) > 0.0)) throw BadParams("grid frequencies must be positive and finite");
    if (i > 0 && !(omegas(i) > omegas(i - 1))) throw BadParams("grid frequencies must be strictly increasing");
  }
  return FrequencyGrid{std::move(omegas)};
}

inline FrequencyGrid logspace_grid(double lo, double hi, Index count) {
  if (count < 1 || !(lo > 0.0) || (count > 1 && !(hi > lo))) throw BadParams("logspace grid needs 0 < lo < hi, N >= 1");
  Vec w(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index i = 0; i < count; ++i) w(i) = count == 1 ? lo : std::pow(10.0, a + (b - a) * double(i) / double(count - 1));
  return make_grid(std::move(w));
}

// 500 points on [1e-4, 1e4] rad/s
inline FrequencyGrid default_grid() { return logspace_grid(1e-4, 1e4, 500); }

// G - G_r realized on the stacked state (x, x_r)
inline StateSpaceSystem error_system(const StateSpaceSystem& full, const StateSpaceSystem& reduced) {
  if (full.m() != reduced.m() || full.p() != reduced.p())
    throw DimensionMismatch("error system needs equal input and output counts");
  const Index n = full.n(), r = reduced.n(), N = n + r;
  auto blockdiag = [&](const SpMat& X, const SpMat& Y) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(X.nonZeros() + Y.nonZeros()));
    for (Index k = 0; k < X.outerSize(); ++k)
      for (SpMat::InnerIterator it(X, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (Index k = 0; k < Y.outerSize(); ++k)
      for (SpMat::InnerIterator it(Y, k); it; ++it) t.emplace_back(n + it.row(), n + it.col(), it.value());
    SpMat M(N, N);
    M.setFromTriplets(t.begin(), t.end());
    return M;
  };
  Mat B(N, full.m()), C(full.p(), N);
  B << full.B, reduced.B;
  C << full.C, -reduced.C;
  return make_state_space(blockdiag(full.E, reduced.E), blockdiag(full.A, reduced.A), B, C);
}

// Gramian-based H2 norm sqrt(tr(C P C^T)), A P + P A^T + B B^T = 0.
inline double h2_norm(const StateSpaceSystem& sys) {
  if (sys.n() > dense_ceiling())
    throw SizeLimitExceeded("Gramian H2 norm needs a dense Lyapunov solve; n = " + std::to_string(sys.n()) +
                            " exceeds the ceiling " + std::to_string(dense_ceiling()));
  auto [A, B] = dense_standard_form(sys);
  Mat P = solve_lyapunov(A, B * B.transpose());
  return std::sqrt(std::max(0.0, (sys.C * P * sys.C.transpose()).trace()));
}

// same norm from the observability Gramian, sqrt(tr(B^T G_o B))
inline double h2_norm_observability(const StateSpaceSystem& sys) {
  if (sys.n() > dense_ceiling()) throw SizeLimitExceeded("Gramian H2 norm refused above the dense ceiling");
  auto [A, B] = dense_standard_form(sys);
  Mat Go = solve_lyapunov(A.transpose(), sys.C.transpose() * sys.C);
  return std::sqrt(std::max(0.0, (B.transpose() * Go * B).trace()));
}

// (1/pi) int_0^inf f(w) dw by adaptive Gauss-Kronrod in log w on
// [1e-8, 1e8], plus first-order tail estimates at both ends. A rounding-level
// integrand never meets a relative tolerance, so callers that expect one
// bound the bisection depth.
inline double h2_quadrature(const std::function<double(double)>& frob2, double rel_tol = 1e-4,
                            unsigned max_depth = 30) {
  const double a = std::log(1e-8), b = std::log(1e8);
  auto g = [&](double t) {
    double w = std::exp(t);
    return frob2(w) * w;
  };
  double err = 0.0;
  double body = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, max_depth, rel_tol, &err);
  double tails = frob2(1e-8) * 1e-8 + frob2(1e8) * 1e8;
  return std::sqrt(std::max(0.0, (body + tails) / M_PI));
}

inline double h2_norm_quadrature(const StateSpaceSystem& sys, double rel_tol = 1e-4) {
  return h2_quadrature([&](double w) { return eval_transfer(sys, cplx(0.0, w)).squaredNorm(); }, rel_tol);
}

struct H2Value {
  double value;
  std::string method;  // "gramian" or "quadrature"
};

// |G - G_r|_H2: Gramian route when n + r fits under the dense ceiling,
// frequency quadrature otherwise. The Gramian route squares the norm, so
// errors below about sqrt(eps) |G| are lost to rounding; those are
// recomputed by quadrature of the pointwise difference.
inline H2Value h2_error(const StateSpaceSystem& full, const StateSpaceSystem& reduced) {
  auto quadrature = [&](unsigned depth) {
    return h2_quadrature(
        [&](double w) {
          cplx s(0.0, w);
          return (eval_transfer(full, s) - eval_transfer(reduced, s)).squaredNorm();
        },
        1e-4, depth);
  };
  if (full.n() + reduced.n() > dense_ceiling()) return {quadrature(30), "quadrature"};
  const double e = h2_norm(error_system(full, reduced));
  if (e > 1e-6 * h2_norm(full)) return {e, "gramian"};
  return {quadrature(8), "quadrature"};
}

inline H2Value h2_norm_auto(const StateSpaceSystem& sys) {
  if (sys.n() <= dense_ceiling()) return {h2_norm(sys), "gramian"};
  return {h2_norm_quadrature(sys), "quadrature"};
}

inline double sigma_max(const CMat& G) {
  Eigen::JacobiSVD<CMat> svd(G);
  return svd.singularValues()(0);
}

// max over the grid of sigma_max(G(iw)); a lower bound for the H-infinity
// norm. Isolated singular grid points are skipped and reported.
inline double hinf_sampled(const StateSpaceSystem& sys, const FrequencyGrid& grid,
                           std::vector<std::string>* warnings = nullptr, unsigned jobs = 1) {
  const std::size_t N = static_cast<std::size_t>(grid.omegas.size());
  std::vector<double> vals(N, -1.0);
  parallel_for(
      N,
      [&](std::size_t i) {
        try {
          vals[i] = sigma_max(eval_transfer(sys, cplx(0.0, grid.omegas(static_cast<Index>(i)))));
        } catch (const SingularPencil&) {
        }
      },
      jobs);
  double best = -1.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (vals[i] < 0.0 && warnings) warnings->push_back("singular pencil at omega = " + std::to_string(grid.omegas(i)));
    best = std::max(best, vals[i]);
  }
  if (best < 0.0) throw SingularPencil("transfer function is singular at every grid point");
  return best;
}

struct SampledError {
  double error_peak;  // max_w sigma_max(G - G_r)
  double full_peak;   // max_w sigma_max(G)
  double relative() const { return error_peak / full_peak; }
};

// numerator and denominator of the approximate relative H-infinity error on
// one grid, one factorization of the full model per frequency
inline SampledError hinf_sampled_error(const StateSpaceSystem& full, const StateSpaceSystem& reduced,
                                       const FrequencyGrid& grid, unsigned jobs = 1) {
  const std::size_t N = static_cast<std::size_t>(grid.omegas.size());
  std::vector<double> e(N, -1.0), f(N, -1.0);
  parallel_for(
      N,
      [&](std::size_t i) {
        cplx s(0.0, grid.omegas(static_cast<Index>(i)));
        try {
          CMat G = eval_transfer(full, s);
          CMat Gr = eval_transfer(reduced, s);
          f[i] = sigma_max(G);
          e[i] = sigma_max(G - Gr);
        } catch (const SingularPencil&) {
        }
      },
      jobs);
  SampledError out{-1.0, -1.0};
  for (std::size_t i = 0; i < N; ++i) {
    out.error_peak = std::max(out.error_peak, e[i]);
    out.full_peak = std::max(out.full_peak, f[i]);
  }
  if (out.full_peak < 0.0) throw SingularPencil("transfer function is singular at every grid point");
  return out;
}

}  // namespace phred
