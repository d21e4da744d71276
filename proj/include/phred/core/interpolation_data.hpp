// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/linalg.hpp"

#include <numeric>
#include <vector>

namespace phred {

// Interpolation points with right tangent directions, closed under
// conjugation. partner[i] is the index of conj(points[i]) (i itself for real
// points). Directions have unit norm and a fixed phase: the first
// significant component is real and nonnegative.
struct InterpolationData {
  std::vector<cplx> points;
  std::vector<CVec> directions;
  std::vector<Index> partner;

  Index size() const { return static_cast<Index>(points.size()); }
  Index m() const { return directions.empty() ? 0 : directions.front().size(); }
  bool is_real(Index i) const { return partner[i] == i; }

  InterpolationData canonical() const;
};

// check: inputs must already be conjugate-closed (within 1e-12 on points,
// 1e-10 on directions); enforce: pair points, then copy conjugates exactly.
// Used on iterates whose pairing is exact up to eigen-solver roundoff.
enum class Closure { check, enforce };

inline bool canonical_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
  return a.imag() < b.imag();
}

inline CVec normalize_direction(CVec b) {
  double nrm = b.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw BadParams("tangent direction must be a nonzero finite vector");
  b /= nrm;
  const double big = b.cwiseAbs().maxCoeff();
  for (Index k = 0; k < b.size(); ++k) {
    double a = std::abs(b(k));
    if (a > 1e-8 * big) {
      b *= std::conj(b(k)) / a;
      b(k) = cplx(a, 0.0);
      break;
    }
  }
  return b;
}

inline InterpolationData make_interpolation_data(std::vector<cplx> points, std::vector<CVec> dirs,
                                                 Closure mode = Closure::check) {
  const std::size_t r = points.size();
  if (r == 0) throw BadParams("interpolation data is empty");
  if (dirs.size() != r) throw DimensionMismatch("one direction per interpolation point is required");
  const Index m = dirs.front().size();
  double maxmod = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
      throw BadParams("interpolation point is not finite");
    if (dirs[i].size() != m) throw DimensionMismatch("tangent directions have different lengths");
    maxmod = std::max(maxmod, std::abs(points[i]));
    dirs[i] = normalize_direction(dirs[i]);
  }
  const double tol = 1e-12 * maxmod;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (std::abs(points[i] - points[j]) <= tol)
        throw CoincidentPoints("interpolation points " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide");

  std::vector<Index> partner(r, -1);
  for (std::size_t i = 0; i < r; ++i) {
    if (std::abs(points[i].imag()) <= tol) {
      points[i] = cplx(points[i].real(), 0.0);
      partner[i] = static_cast<Index>(i);
      if (mode == Closure::check && dirs[i].imag().norm() > 1e-10)
        throw NotConjugateClosed("real point " + std::to_string(i) + " has a complex direction");
      Vec re = dirs[i].real();
      dirs[i] = normalize_direction(re.cast<cplx>());
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    if (partner[i] >= 0 || points[i].imag() < 0.0) continue;
    std::size_t best = r;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r; ++j) {
      if (partner[j] >= 0 || points[j].imag() >= 0.0) continue;
      double d = std::abs(points[j] - std::conj(points[i]));
      if (d < bestd) bestd = d, best = j;
    }
    if (best == r || bestd > tol)
      throw NotConjugateClosed("point " + fmt_complex(points[i]) + " has no conjugate partner");
    if (mode == Closure::check && (dirs[best] - dirs[i].conjugate()).norm() > 1e-10)
      throw NotConjugateClosed("directions at " + fmt_complex(points[i]) + " and its conjugate are not conjugate");
    points[best] = std::conj(points[i]);
    dirs[best] = dirs[i].conjugate();
    partner[i] = static_cast<Index>(best);
    partner[best] = static_cast<Index>(i);
  }
  for (std::size_t i = 0; i < r; ++i)
    if (partner[i] < 0) throw NotConjugateClosed("point " + fmt_complex(points[i]) + " has no conjugate partner");
  return InterpolationData{std::move(points), std::move(dirs), std::move(partner)};
}

inline InterpolationData InterpolationData::canonical() const {
  std::vector<Index> order(points.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return canonical_less(points[a], points[b]); });
  InterpolationData out;
  std::vector<Index> where(points.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.points.push_back(points[order[k]]);
    out.directions.push_back(directions[order[k]]);
    where[order[k]] = static_cast<Index>(k);
  }
  for (std::size_t k = 0; k < order.size(); ++k) out.partner.push_back(where[partner[order[k]]]);
  return out;
}

}  // namespace phred
