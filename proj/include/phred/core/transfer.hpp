// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/state_space.hpp"

namespace phred {

// G(s) = C (sE - A)^{-1} B by one factorization and m solves.
inline CMat eval_transfer(const StateSpaceSystem& sys, cplx s) {
  ShiftedSolver lu(sys.E, sys.A, s, sys.e_identity);
  return sys.C.cast<cplx>() * lu.solve(sys.B.cast<cplx>());
}

// G'(s) = -C (sE - A)^{-1} E (sE - A)^{-1} B
inline CMat eval_transfer_derivative(const StateSpaceSystem& sys, cplx s) {
  ShiftedSolver lu(sys.E, sys.A, s, sys.e_identity);
  CMat X = lu.solve(sys.B.cast<cplx>());
  CMat EX = sys.e_identity ? X : CMat(sys.E.cast<cplx>() * X);
  return -(sys.C.cast<cplx>() * lu.solve(EX));
}

}  // namespace phred
