// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/analysis/norms.hpp"

namespace phred {

struct ResponseTable {
  Vec omegas;
  Vec sigma;  // sigma_max(G(iw))
  Mat phase;  // rows: frequencies; column i*m + j: unwrapped arg G_ij(iw) [rad]
  Index p = 0, m = 0;
};

// cumulative 2 pi correction along the rows of each column
inline void unwrap_columns(Mat& ph) {
  for (Index c = 0; c < ph.cols(); ++c) {
    double offset = 0.0;
    for (Index i = 1; i < ph.rows(); ++i) {
      double raw = ph(i, c) + offset;
      double d = raw - ph(i - 1, c);
      while (d > M_PI) offset -= 2.0 * M_PI, d -= 2.0 * M_PI;
      while (d < -M_PI) offset += 2.0 * M_PI, d += 2.0 * M_PI;
      ph(i, c) = ph(i - 1, c) + d;
    }
  }
}

inline ResponseTable frequency_response(const StateSpaceSystem& sys, const FrequencyGrid& grid, unsigned jobs = 1) {
  const Index N = grid.omegas.size();
  ResponseTable t{grid.omegas, Vec(N), Mat(N, sys.p() * sys.m()), sys.p(), sys.m()};
  parallel_for(
      static_cast<std::size_t>(N),
      [&](std::size_t k) {
        const Index i = static_cast<Index>(k);
        CMat G = eval_transfer(sys, cplx(0.0, grid.omegas(i)));
        t.sigma(i) = sigma_max(G);
        for (Index a = 0; a < sys.p(); ++a)
          for (Index b = 0; b < sys.m(); ++b) t.phase(i, a * sys.m() + b) = std::arg(G(a, b));
      },
      jobs);
  unwrap_columns(t.phase);
  return t;
}

}  // namespace phred
