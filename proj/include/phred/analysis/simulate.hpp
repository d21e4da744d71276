// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace phred {

enum class SignalKind { decaying_sinusoid, square_wave, zero };

// Scalar excitation applied to one input channel, all others zero.
struct InputSignal {
  SignalKind kind = SignalKind::zero;
  double alpha = 0.05, beta = 5.0;  // e^{-alpha t} sin(beta t)
  double period = 0.2 * M_PI;       // square wave, +1 on the first half period
  Index channel = 0;

  double scalar(double t) const {
    switch (kind) {
      case SignalKind::decaying_sinusoid: return std::exp(-alpha * t) * std::sin(beta * t);
      case SignalKind::square_wave: {
        double ph = std::fmod(t, period);
        if (ph < 0.0) ph += period;
        return ph < 0.5 * period ? 1.0 : -1.0;
      }
      case SignalKind::zero: return 0.0;
    }
    return 0.0;
  }

  Vec value(double t, Index m) const {
    Vec u = Vec::Zero(m);
    if (channel < m) u(channel) = scalar(t);
    return u;
  }
};

struct SignalParams {
  double alpha = 0.05, beta = 5.0, period = 0.2 * M_PI;
  Index channel = 0;
};

inline InputSignal make_signal(SignalKind kind, const SignalParams& p = {}) {
  InputSignal s;
  s.kind = kind;
  s.channel = p.channel;
  if (p.channel < 0) throw BadParams("signal channel must be >= 0");
  if (kind == SignalKind::decaying_sinusoid) {
    if (!(p.alpha >= 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta))
      throw BadParams("decaying sinusoid needs alpha >= 0 and beta > 0");
    s.alpha = p.alpha;
    s.beta = p.beta;
  } else if (kind == SignalKind::square_wave) {
    if (!(p.period > 0.0) || !std::isfinite(p.period)) throw BadParams("square wave period must be positive");
    s.period = p.period;
  }
  return s;
}

struct SimOptions {
  double rtol = 1e-6;
  double atol = 1e-9;
  Index samples = 2001;   // uniform output samples including t = 0 and t_end
  Vec x0;                  // empty: zero initial state
};

struct Trajectory {
  Vec times;
  Mat outputs;        // p x samples
  Vec initial_state;
  Vec final_state;
  double supplied_energy = 0.0;  // int_0^T u^T y dt
  std::size_t steps = 0;
};

// Dormand-Prince 5(4) with dense output; the state is augmented with the
// running supply integral so passivity can be checked afterwards.
inline Trajectory simulate(const StateSpaceSystem& sys, const InputSignal& input, double t_end,
                           const SimOptions& opt = {}) {
  namespace ode = boost::numeric::odeint;
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw BadParams("simulation end time must be positive");
  if (opt.samples < 2) throw BadParams("at least two output samples are needed");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw BadParams("tolerances must be positive");
  const Index n = sys.n(), m = sys.m();
  if (opt.x0.size() != 0 && opt.x0.size() != n) throw DimensionMismatch("initial state has the wrong size");

  std::unique_ptr<Eigen::SparseLU<SpMat>> elu;
  if (!sys.e_identity) {
    elu = std::make_unique<Eigen::SparseLU<SpMat>>(sys.E);
    if (elu->info() != Eigen::Success) throw SingularPencil("E is singular");
  }
  using State = std::vector<double>;
  auto rhs = [&](const State& z, State& dz, double t) {
    Eigen::Map<const Vec> x(z.data(), n);
    Eigen::Map<Vec> dx(dz.data(), n);
    Vec u = input.value(t, m);
    Vec f = sys.A * x + sys.B * u;
    dx = elu ? Vec(elu->solve(f)) : f;
    dz[static_cast<std::size_t>(n)] = u.dot(sys.C * x);
  };

  Trajectory tr;
  tr.times.resize(opt.samples);
  for (Index i = 0; i < opt.samples; ++i) tr.times(i) = t_end * double(i) / double(opt.samples - 1);
  tr.outputs.resize(sys.p(), opt.samples);
  tr.initial_state = opt.x0.size() ? opt.x0 : Vec::Zero(n);
  State z(static_cast<std::size_t>(n) + 1, 0.0);
  for (Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = tr.initial_state(i);

  Index k = 0;
  auto observe = [&](const State& s, double) {
    Eigen::Map<const Vec> x(s.data(), n);
    if (!x.allFinite()) throw NonFiniteState("state became non-finite during simulation");
    tr.outputs.col(k++) = sys.C * x;
  };
  auto stepper = ode::make_dense_output(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
  const double dt0 = std::min(1e-3, t_end / double(opt.samples - 1));
  try {
    tr.steps = ode::integrate_times(stepper, rhs, z, tr.times.data(), tr.times.data() + opt.samples, dt0, observe,
                                    ode::max_step_checker(1000000));
  } catch (const ode::step_adjustment_error& e) {
    throw StepSizeUnderflow(std::string("integrator step size underflow: ") + e.what());
  } catch (const ode::no_progress_error& e) {
    throw StepSizeUnderflow(std::string("integrator made no progress: ") + e.what());
  }
  tr.final_state = Eigen::Map<const Vec>(z.data(), n);
  tr.supplied_energy = z[static_cast<std::size_t>(n)];
  if (!tr.final_state.allFinite() || !std::isfinite(tr.supplied_energy))
    throw NonFiniteState("state became non-finite during simulation");
  return tr;
}

// int u^T y dt - (H(x_T) - H(x_0)); nonnegative for a passive system up to
// integration error
inline double passivity_margin(const PortHamiltonianSystem& ph, const Trajectory& tr) {
  auto H = [&](const Vec& x) { return 0.5 * x.dot(ph.Q * x); };
  return tr.supplied_energy - (H(tr.final_state) - H(tr.initial_state));
}

}  // namespace phred
