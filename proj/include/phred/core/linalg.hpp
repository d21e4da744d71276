// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/errors.hpp"
#include "phred/core/types.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace phred {

// rcond() alone misses exactly singular input: a zero pivot makes its
// estimate meaningless, so the pivots are checked first
template <class Lu>
bool numerically_singular(const Lu& lu) {
  const Vec piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(piv.minCoeff() > 1e-14 * piv.maxCoeff())) return true;
  return !(lu.rcond() > 1e-14);
}

inline std::string fmt_complex(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

inline bool all_finite(const SpMat& m) {
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (!std::isfinite(it.value())) return false;
  return true;
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }

// 2-norm of a symmetric matrix. Dense eigenvalues when small, power
// iteration on M^2 otherwise (only used for tolerance scaling).
inline double sym_norm2(const SpMat& m) {
  const Index n = m.rows();
  if (n == 0) return 0.0;
  if (n < kDenseBelow) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  Vec x(n);
  for (Index i = 0; i < n; ++i) x(i) = nd(gen);
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec y = m * x;
    double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    double prev = est;
    est = nrm;
    x = y / nrm;
    if (it > 5 && std::abs(est - prev) <= 1e-6 * est) break;
  }
  return est;
}

inline double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline double norm2(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

template <class M>
double cond2(const M& m) {
  Eigen::JacobiSVD<M> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

// Inertia-based definiteness test: LDL^T pivots of a symmetric matrix.
// Returns the smallest pivot, or nullopt when the factorization broke down.
inline std::optional<double> min_ldlt_pivot(const SpMat& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  if (m.rows() < kDenseBelow) {
    Eigen::LDLT<Mat> ldlt{Mat(m)};
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    return ldlt.vectorD().minCoeff();
  }
  Eigen::SimplicialLDLT<SpMat> ldlt(m);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  return ldlt.vectorD().minCoeff();
}

// Factorization of sE - A for one complex shift. Dense LU below kDenseBelow,
// SparseLU above. Supports solves with the matrix and with its transpose.
class ShiftedSolver {
 public:
  ShiftedSolver(const SpMat& E, const SpMat& A, cplx s, bool e_identity = false) : s_(s), n_(A.rows()) {
    SpCMat M = (e_identity ? SpMat(identity(n_)) : E).cast<cplx>() * s - A.cast<cplx>();
    M.makeCompressed();
    norm1_ = 0.0;
    for (Index k = 0; k < M.outerSize(); ++k) {
      double col = 0.0;
      for (SpCMat::InnerIterator it(M, k); it; ++it) col += std::abs(it.value());
      norm1_ = std::max(norm1_, col);
    }
    if (n_ < kDenseBelow) {
      dense_.emplace(CMat(M));
      if (numerically_singular(*dense_)) throw SingularPencil("sE - A is singular at s = " + fmt_complex(s));
    } else {
      sparse_ = std::make_unique<Eigen::SparseLU<SpCMat>>();
      sparse_->analyzePattern(M);
      sparse_->factorize(M);
      if (sparse_->info() != Eigen::Success)
        throw SingularPencil("sparse LU of sE - A failed at s = " + fmt_complex(s));
    }
  }

  cplx shift() const { return s_; }

  CMat solve(const CMat& rhs) const { return checked(dense_ ? CMat(dense_->solve(rhs)) : CMat(sparse_->solve(rhs)), rhs); }

  // solves (sE - A)^T x = rhs (plain transpose, no conjugation)
  CMat solve_transpose(const CMat& rhs) const {
    return checked(dense_ ? CMat(dense_->transpose().solve(rhs)) : CMat(sparse_->transpose().solve(rhs)), rhs);
  }

 private:
  CMat checked(CMat x, const CMat& rhs) const {
    if (!x.allFinite()) throw SingularPencil("non-finite solution at s = " + fmt_complex(s_));
    double bn = rhs.norm();
    // a huge solution relative to the data means the pencil is numerically singular
    if (bn > 0.0 && norm1_ * x.norm() / bn > 1e15)
      throw SingularPencil("sE - A is numerically singular at s = " + fmt_complex(s_));
    return x;
  }

  cplx s_;
  Index n_;
  double norm1_ = 0.0;
  std::optional<Eigen::PartialPivLU<CMat>> dense_;
  std::unique_ptr<Eigen::SparseLU<SpCMat>> sparse_;
};

// Orthonormal basis of range(X) by column-pivoted QR; throws RankDeficient
// when the smallest singular value of R is below tol times the largest,
// unless strict is false (then the trailing columns of Q complete the basis).
inline Mat orthonormal_basis(const Mat& X, double tol, double* cond_out = nullptr, bool strict = true) {
  Eigen::ColPivHouseholderQR<Mat> qr(X);
  const Index k = X.cols();
  Mat R = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Mat> svd(R);
  const Vec& sv = svd.singularValues();
  double c = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
  if (cond_out) *cond_out = c;
  if (strict && !(sv(k - 1) > tol * sv(0))) {
    std::ostringstream os;
    os << "basis is numerically rank deficient (sigma_min/sigma_max = " << sv(k - 1) / sv(0) << ")";
    throw RankDeficient(os.str());
  }
  Mat Q = qr.householderQ() * Mat::Identity(X.rows(), k);
  return Q;
}

// Largest principal angle between range(Q1) and range(Q2), both orthonormal.
inline double largest_principal_angle(const Mat& Q1, const Mat& Q2) {
  Mat P = Q2 - Q1 * (Q1.transpose() * Q2);
  double s = norm2(P);
  return std::asin(std::min(1.0, s));
}

}  // namespace phred
