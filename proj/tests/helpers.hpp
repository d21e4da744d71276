// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/phred.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

namespace phred::test {

inline PortHamiltonianSystem msd(Index n) {
  MsdParams p;
  p.n = n;
  return build_msd(p);
}

// the damped ladder used in the comparison runs
inline PortHamiltonianSystem ladder(Index n) {
  LadderParams p;
  p.n = n;
  p.resistance = std::vector<double>(static_cast<std::size_t>(n / 2 + 1), 3.0);
  p.resistance.back() = 1.0;
  return build_ladder(p);
}

inline Mat random_matrix(Index r, Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Mat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = nd(gen);
  return m;
}

// C (sI - A)^{-1} B by dense inversion
inline CMat dense_transfer(const StateSpaceSystem& sys, cplx s) {
  CMat M = s * Mat(sys.E).cast<cplx>() - Mat(sys.A).cast<cplx>();
  return sys.C.cast<cplx>() * M.inverse() * sys.B.cast<cplx>();
}

inline double rel_diff(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

inline StateSpaceSystem scalar_system(double a = -1.0) {
  return make_state_space(Mat::Constant(1, 1, a), Mat::Ones(1, 1), Mat::Ones(1, 1));
}

// largest distance from an eigenvalue of A to its nearest unmatched
// eigenvalue of B; sorting would pair up rounding-level ties inconsistently
inline double spectrum_distance(const Mat& A, const Mat& B) {
  CVec a = Eigen::EigenSolver<Mat>(A, false).eigenvalues();
  CVec b = Eigen::EigenSolver<Mat>(B, false).eigenvalues();
  std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    Index best = -1;
    for (Index j = 0; j < b.size(); ++j)
      if (!used[static_cast<std::size_t>(j)] && (best < 0 || std::abs(a(i) - b(j)) < std::abs(a(i) - b(best)))) best = j;
    used[static_cast<std::size_t>(best)] = true;
    worst = std::max(worst, std::abs(a(i) - b(best)));
  }
  return worst;
}

// dissipative chain with J = 0: R and Q SPD tridiagonal, two ports
inline PortHamiltonianSystem gradient_system(Index n) {
  Mat R = Mat::Zero(n, n), Q = Mat::Zero(n, n), B = Mat::Zero(n, 2);
  for (Index i = 0; i < n; ++i) {
    R(i, i) = 0.5 + 0.01 * double(i);
    Q(i, i) = 2.0 + 0.02 * double(i);
    if (i + 1 < n) {
      R(i, i + 1) = R(i + 1, i) = 0.2;
      Q(i, i + 1) = Q(i + 1, i) = -0.9;
    }
  }
  B(0, 0) = 1.0;
  B(n - 1, 1) = 1.0;
  B(n / 2, 0) = 0.5;
  return build_ph(Mat(Mat::Zero(n, n)), R, Q, B);
}

}  // namespace phred::test
