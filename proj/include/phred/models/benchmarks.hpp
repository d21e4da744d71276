// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"

#include <vector>

namespace phred {

// Per-element parameters; a single value is broadcast to every element.
struct MsdParams {
  Index n = 6;
  std::vector<double> masses{4.0};
  std::vector<double> stiffness{4.0};
  std::vector<double> damping{1.0};
};

struct LadderParams {
  Index n = 4;
  std::vector<double> capacitance{0.1};
  std::vector<double> inductance{0.1};
  std::vector<double> resistance{3.0};  // n/2 + 1 resistors
};

namespace detail {

inline std::vector<double> broadcast(const std::vector<double>& v, Index count, const char* what, bool allow_zero) {
  std::vector<double> out;
  if (v.size() == 1)
    out.assign(static_cast<std::size_t>(count), v.front());
  else if (static_cast<Index>(v.size()) == count)
    out = v;
  else
    throw BadParams(std::string(what) + ": expected 1 or " + std::to_string(count) + " values");
  for (double x : out)
    if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0))
      throw BadParams(std::string(what) + " must be " + (allow_zero ? "nonnegative" : "positive"));
  return out;
}

inline SpMat from_triplets(Index n, Index cols, const std::vector<Eigen::Triplet<double>>& t) {
  SpMat m(n, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

}  // namespace detail

// Chain of n/2 masses. State (q_1, p_1, q_2, p_2, ...): spring elongations
// and momenta. Spring k_i joins mass i to mass i+1, the last spring ties the
// last mass to the wall. Inputs act on the first two masses.
inline PortHamiltonianSystem build_msd(const MsdParams& p) {
  if (p.n < 2 || p.n % 2 != 0) throw BadParams("mass-spring-damper order must be even and >= 2");
  const Index N = p.n / 2;
  auto m = detail::broadcast(p.masses, N, "masses", false);
  auto k = detail::broadcast(p.stiffness, N, "stiffness", false);
  auto c = detail::broadcast(p.damping, N, "damping", true);
  std::vector<Eigen::Triplet<double>> J, R, Q;
  for (Index i = 0; i < N; ++i) {
    const Index q = 2 * i, mom = 2 * i + 1;
    J.emplace_back(q, mom, 1.0);
    J.emplace_back(mom, q, -1.0);
    R.emplace_back(mom, mom, c[i]);
    Q.emplace_back(mom, mom, 1.0 / m[i]);
    Q.emplace_back(q, q, k[i] + (i > 0 ? k[i - 1] : 0.0));
    if (i + 1 < N) {
      Q.emplace_back(q, q + 2, -k[i]);
      Q.emplace_back(q + 2, q, -k[i]);
    }
  }
  const Index inputs = N >= 2 ? 2 : 1;
  Mat B = Mat::Zero(p.n, inputs);
  B(1, 0) = 1.0;
  if (inputs == 2) B(3, 1) = 1.0;
  return build_ph(detail::from_triplets(p.n, p.n, J), detail::from_triplets(p.n, p.n, R),
                  detail::from_triplets(p.n, p.n, Q), B);
}

// Ladder of n/2 capacitor/inductor sections. State (q_1, phi_1, q_2, ...).
// Inputs: current into the first node and voltage at the right end; the
// last inductor is oriented against the chain so the right port voltage
// enters with a plus sign. The terminal resistor lumps into the last flux.
inline PortHamiltonianSystem build_ladder(const LadderParams& p) {
  if (p.n < 4 || p.n % 2 != 0) throw BadParams("ladder order must be even and >= 4");
  const Index N = p.n / 2;
  auto C = detail::broadcast(p.capacitance, N, "capacitance", false);
  auto L = detail::broadcast(p.inductance, N, "inductance", false);
  auto Rs = detail::broadcast(p.resistance, N + 1, "resistance", true);
  std::vector<Eigen::Triplet<double>> J, R, Q;
  for (Index i = 0; i < N; ++i) {
    const Index q = 2 * i, phi = 2 * i + 1;
    Q.emplace_back(q, q, 1.0 / C[i]);
    Q.emplace_back(phi, phi, 1.0 / L[i]);
    if (i + 1 < N) {
      J.emplace_back(q, phi, -1.0);
      J.emplace_back(phi, q, 1.0);
      J.emplace_back(phi, q + 2, -1.0);
      J.emplace_back(q + 2, phi, 1.0);
      R.emplace_back(phi, phi, Rs[i]);
    } else {
      J.emplace_back(q, phi, 1.0);
      J.emplace_back(phi, q, -1.0);
      R.emplace_back(phi, phi, Rs[i] + Rs[i + 1]);
    }
  }
  Mat B = Mat::Zero(p.n, 2);
  B(0, 0) = 1.0;
  B(p.n - 1, 1) = 1.0;
  return build_ph(detail::from_triplets(p.n, p.n, J), detail::from_triplets(p.n, p.n, R),
                  detail::from_triplets(p.n, p.n, Q), B);
}

}  // namespace phred
