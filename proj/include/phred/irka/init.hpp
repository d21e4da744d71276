// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"
#include "phred/core/transfer.hpp"

#include <random>

namespace phred {

inline std::vector<double> logspace(double lo, double hi, Index count) {
  std::vector<double> out;
  if (count == 1) return {lo};
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * double(i) / double(count - 1)));
  return out;
}

inline CVec leading_right_singular_vector(const CMat& G) {
  Eigen::JacobiSVD<CMat> svd(G, Eigen::ComputeThinV);
  return svd.matrixV().col(0);
}

// Directions from the dominant right singular vector of G at each point.
// Points must already be conjugate closed.
inline InterpolationData init_from_points(const StateSpaceSystem& sys, const std::vector<cplx>& points) {
  std::vector<CVec> dirs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const cplx s = points[i];
    bool done = false;
    for (std::size_t j = 0; j < i; ++j)
      if (points[j] == std::conj(s) && s.imag() != 0.0) {
        dirs[i] = dirs[j].conjugate();
        done = true;
        break;
      }
    if (done) continue;
    CVec v = leading_right_singular_vector(eval_transfer(sys, s));
    if (s.imag() == 0.0) {
      // real G(s): take the real representative
      Index k = 0;
      v.cwiseAbs().maxCoeff(&k);
      v *= std::abs(v(k)) / v(k);
      v = CVec(v.real().cast<cplx>());
    }
    dirs[i] = v;
  }
  return make_interpolation_data(points, dirs, Closure::check);
}

// r real points logspaced on [lo, hi], dominant right singular directions.
inline InterpolationData default_init(const StateSpaceSystem& sys, Index r, double lo, double hi) {
  if (r < 1) throw BadParams("reduction order must be >= 1");
  if (!(lo > 0.0) || !(hi > lo)) throw BadParams("logspace init needs 0 < lo < hi");
  std::vector<cplx> pts;
  for (double x : logspace(lo, hi, r)) pts.emplace_back(x, 0.0);
  return init_from_points(sys, pts);
}

// r real points on [-hi, -lo] (left half-plane), lo, hi > 0
inline InterpolationData lhp_logspace_init(const StateSpaceSystem& sys, Index r, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw BadParams("lhp logspace init needs 0 < lo < hi");
  std::vector<cplx> pts;
  for (double x : logspace(lo, hi, r)) pts.emplace_back(-x, 0.0);
  return init_from_points(sys, pts);
}

// r/2 conjugate pairs, real parts logspaced on [re_lo, re_hi], imaginary
// parts on [im_lo, im_hi]; an odd r adds one real point at re_lo.
inline InterpolationData complex_grid_init(const StateSpaceSystem& sys, Index r, double re_lo = 1e-6,
                                           double re_hi = 1.0, double im_lo = 1e-3, double im_hi = 1e-1) {
  if (r < 1) throw BadParams("reduction order must be >= 1");
  const Index pairs = r / 2;
  std::vector<cplx> pts;
  if (pairs > 0) {
    auto re = logspace(re_lo, re_hi, pairs);
    auto im = logspace(im_lo, im_hi, pairs);
    for (Index k = 0; k < pairs; ++k) {
      pts.emplace_back(re[k], im[k]);
      pts.emplace_back(re[k], -im[k]);
    }
  }
  if (r % 2) pts.emplace_back(re_lo, 0.0);
  return init_from_points(sys, pts);
}

// The r full-order poles of smallest modulus, never splitting a conjugate
// pair (a real pole fills the last slot when needed).
inline std::vector<cplx> smallest_poles(const StateSpaceSystem& sys, Index r) {
  if (sys.n() > dense_ceiling())
    throw SizeLimitExceeded("pole-based initialization needs a dense eigensolve (n = " + std::to_string(sys.n()) + ")");
  CVec ev = eigenvalues(dense_standard_form(sys).first);
  std::vector<cplx> all(ev.data(), ev.data() + ev.size());
  for (auto& z : all)
    if (std::abs(z.imag()) <= 1e-14 * std::abs(z)) z = cplx(z.real(), 0.0);
  std::sort(all.begin(), all.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return canonical_less(a, b);
  });
  std::vector<cplx> out;
  std::vector<bool> used(all.size(), false);
  for (std::size_t i = 0; i < all.size() && static_cast<Index>(out.size()) < r; ++i) {
    if (used[i]) continue;
    cplx z = all[i];
    if (z.imag() == 0.0) {
      out.push_back(z);
      used[i] = true;
      continue;
    }
    if (static_cast<Index>(out.size()) + 2 > r) continue;
    std::size_t partner = all.size();
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!used[j] && std::abs(all[j] - std::conj(z)) <= 1e-10 * std::abs(z)) {
        partner = j;
        break;
      }
    if (partner == all.size()) continue;
    used[i] = used[partner] = true;
    out.push_back(cplx(z.real(), std::abs(z.imag())));
    out.push_back(cplx(z.real(), -std::abs(z.imag())));
  }
  if (static_cast<Index>(out.size()) != r)
    throw BadParams("cannot select a conjugate-closed set of " + std::to_string(r) + " poles");
  return out;
}

// poles scaled by (1 + eps): left half-plane points close to the poles
inline InterpolationData perturbed_poles_init(const StateSpaceSystem& sys, Index r, double eps = 1e-3) {
  auto pts = smallest_poles(sys, r);
  for (auto& z : pts) z *= (1.0 + eps);
  return init_from_points(sys, pts);
}

// mirror images -lambda of the poles
inline InterpolationData reflected_poles_init(const StateSpaceSystem& sys, Index r) {
  auto pts = smallest_poles(sys, r);
  for (auto& z : pts) z = -z;
  return init_from_points(sys, pts);
}

// seeded uniform real points on [lo, hi]
inline InterpolationData random_init(const StateSpaceSystem& sys, Index r, double lo, double hi, std::uint64_t seed) {
  if (!(hi > lo)) throw BadParams("random init needs lo < hi");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ud(lo, hi);
  std::vector<cplx> pts;
  for (Index i = 0; i < r; ++i) pts.emplace_back(ud(gen), 0.0);
  return init_from_points(sys, pts);
}

}  // namespace phred
