// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
//
// Twenty-thousand-state chain. Several minutes of runtime; registered as a
// separate test with a long timeout.

#include "helpers.hpp"

using namespace phred;
using namespace phred::test;

namespace {

struct Large {
  PortHamiltonianSystem ph = msd(20000);
  StateSpaceSystem sys = ph_to_state_space(ph);
  MethodRun r20, r50;

  Large() {
    InitSpec init;  // logspace on [1e-3, 1e-1]
    IrkaOptions opts;
    opts.max_iterations = 300;
    opts.stagnation_window = 30;
    r20 = run_method(ph, Method::irka_ph, 20, init, opts);
    r50 = run_method(ph, Method::irka_ph, 50, init, opts);
  }
};

const Large& large() {
  static const Large l;
  return l;
}

}  // namespace

TEST_CASE("large chain: square-wave response of the reduced models", "[slow]") {
  const Large& l = large();
  INFO("r=20 converged " << l.r20.converged << " after " << l.r20.iterations << " iterations");
  INFO("r=50 converged " << l.r50.converged << " after " << l.r50.iterations << " iterations");
  CHECK(l.r50.converged);
  InputSignal u = make_signal(SignalKind::square_wave);
  Trajectory full = simulate(l.sys, u, 20.0);
  const std::pair<const MethodRun*, double> cases[] = {{&l.r20, 7.38e-3}, {&l.r50, 5.85e-3}};
  for (const auto& [run, ref] : cases) {
    Trajectory red = simulate(run->model, u, 20.0);
    const double err = (full.outputs.row(0) - red.outputs.row(0)).cwiseAbs().maxCoeff();
    INFO("r=" << run->r << " max output error " << err << ", reference " << ref);
    CHECK(err <= 2.0 * ref);
    CHECK(err >= ref / 2.0);
  }
}

TEST_CASE("large chain: frequency response of the order-fifty model", "[slow]") {
  const Large& l = large();
  const FrequencyGrid grid = default_grid();
  SampledError e = hinf_sampled_error(l.sys, l.r50.model, grid);
  INFO("relative sampled H-infinity error " << e.relative());
  CHECK(e.relative() <= 3.0 * 7.90e-4);
  CHECK(e.relative() >= 7.90e-4 / 3.0);
  ResponseTable full = frequency_response(l.sys, grid), red = frequency_response(l.r50.model, grid);
  const double gap = (full.sigma - red.sigma).cwiseAbs().maxCoeff();
  INFO("largest sigma gap " << gap);
  CHECK(gap <= 1e-3);
}
