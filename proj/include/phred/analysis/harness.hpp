// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/analysis/norms.hpp"
#include "phred/balancing/balancing.hpp"
#include "phred/irka/init.hpp"
#include "phred/io/matrix_market.hpp"
#include "phred/irka/irka.hpp"

#include <optional>

namespace phred {

enum class Method { irka_ph, one_step, effort_bal, balanced, irka_general };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::irka_ph: return "irka_ph";
    case Method::one_step: return "one_step";
    case Method::effort_bal: return "effort_bal";
    case Method::balanced: return "balanced";
    case Method::irka_general: return "irka_general";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::irka_ph, Method::one_step, Method::effort_bal, Method::balanced, Method::irka_general})
    if (s == to_string(m)) return m;
  throw BadParams("unknown method '" + s + "'");
}

inline bool preserves_structure(Method m) { return m != Method::balanced && m != Method::irka_general; }

enum class InitKind { logspace, lhp_logspace, complex_grid, perturbed_poles, reflected_poles, random, file };

struct InitSpec {
  InitKind kind = InitKind::logspace;
  double lo = 1e-3;
  double hi = 1e-1;
  double eps = 1e-3;
  std::uint64_t seed = 0;
  std::optional<InterpolationData> data;  // kind == file
};

// accepts logspace:LO:HI, lhp-logspace:LO:HI, complex-grid, perturbed-poles:EPS,
// reflected-poles, random:LO:HI; file:PATH is resolved by the caller
inline InitSpec parse_init(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  auto number = [&](std::size_t i) {
    if (i >= parts.size()) throw BadParams("init spec '" + text + "' is missing a parameter");
    return mm::parse_double(parts[i], "init spec");
  };
  InitSpec s;
  const std::string& k = parts[0];
  if (k == "logspace" || k == "lhp-logspace" || k == "random") {
    s.kind = k == "logspace" ? InitKind::logspace : k == "random" ? InitKind::random : InitKind::lhp_logspace;
    if (parts.size() != 3) throw BadParams("init spec '" + text + "' needs LO:HI");
    s.lo = number(1);
    s.hi = number(2);
  } else if (k == "perturbed-poles") {
    s.kind = InitKind::perturbed_poles;
    if (parts.size() > 2) throw BadParams("init spec '" + text + "' takes one parameter");
    if (parts.size() == 2) s.eps = number(1);
  } else if (k == "reflected-poles" || k == "complex-grid") {
    if (parts.size() != 1) throw BadParams("init spec '" + text + "' takes no parameters");
    s.kind = k == "complex-grid" ? InitKind::complex_grid : InitKind::reflected_poles;
  } else if (k == "file") {
    if (parts.size() < 2) throw BadParams("init spec file:PATH needs a path");
    s.kind = InitKind::file;
  } else {
    throw BadParams("unknown init strategy '" + k + "'");
  }
  return s;
}

inline InterpolationData make_init(const StateSpaceSystem& sys, Index r, const InitSpec& s) {
  switch (s.kind) {
    case InitKind::logspace: return default_init(sys, r, s.lo, s.hi);
    case InitKind::lhp_logspace: return lhp_logspace_init(sys, r, s.lo, s.hi);
    case InitKind::complex_grid: return complex_grid_init(sys, r);
    case InitKind::perturbed_poles: return perturbed_poles_init(sys, r, s.eps);
    case InitKind::reflected_poles: return reflected_poles_init(sys, r);
    case InitKind::random: return random_init(sys, r, s.lo, s.hi, s.seed);
    case InitKind::file:
      if (!s.data) throw BadParams("init file was not loaded");
      if (s.data->size() != r)
        throw BadParams("init file has " + std::to_string(s.data->size()) + " points, order is " + std::to_string(r));
      return *s.data;
  }
  throw BadParams("unknown init strategy");
}

struct MethodRun {
  Method method = Method::irka_ph;
  Index r = 0;
  std::optional<PortHamiltonianSystem> ph;  // structure-preserving methods
  StateSpaceSystem model;
  bool converged = true;  // false: IRKA stopped early, model is its best iterate
  int iterations = 0;
  int best_iteration = 0;
  std::optional<IrkaTrace> trace;
  std::optional<InterpolationData> data;  // one_step interpolation data
  std::vector<std::string> warnings;
};

// Runs one reduction method. IRKA runs that stop without converging return
// their best iterate with converged = false instead of throwing.
inline MethodRun run_method(const PortHamiltonianSystem& ph, Method method, Index r, const InitSpec& init,
                            const IrkaOptions& opts = {}) {
  const StateSpaceSystem sys = ph_to_state_space(ph);
  if (r < 1 || r >= sys.n()) throw BadParams("reduction order must be < n");
  MethodRun run;
  run.method = method;
  run.r = r;
  auto irka_failure = [&](const MaxIterationsExceeded& e) {
    run.converged = false;
    run.iterations = static_cast<int>(e.trace().iterations.size());
    run.best_iteration = e.best_iteration();
    run.trace = e.trace();
    run.warnings.push_back(std::string(e.what()) + "; best iterate " + std::to_string(e.best_iteration()));
  };
  switch (method) {
    case Method::irka_ph: {
      try {
        auto res = irka_ph(ph, make_init(sys, r, init), opts);
        run.ph = std::move(res.model);
        run.iterations = run.best_iteration = static_cast<int>(res.trace.iterations.size());
        run.trace = std::move(res.trace);
      } catch (const MaxIterationsExceeded& e) {
        irka_failure(e);
        run.ph = *e.best_ph();
      }
      break;
    }
    case Method::irka_general: {
      try {
        auto res = irka_general(sys, make_init(sys, r, init), opts);
        run.model = std::move(res.model);
        run.iterations = run.best_iteration = static_cast<int>(res.trace.iterations.size());
        run.trace = std::move(res.trace);
      } catch (const MaxIterationsExceeded& e) {
        irka_failure(e);
        run.model = *e.best_ss();
      }
      break;
    }
    case Method::one_step: {
      run.data = make_init(sys, r, init);
      ReduceOptions ro;
      ro.allow_rank_deficient = true;
      ro.jobs = opts.jobs;
      PhProjection proj = ph_structure_reduce_detailed(ph, *run.data, ro);
      run.warnings = proj.warnings;
      run.ph = std::move(proj.reduced);
      break;
    }
    case Method::effort_bal: {
      TruncationInfo info;
      run.ph = effort_constraint_reduce(ph, r, &info);
      run.warnings = info.warnings;
      break;
    }
    case Method::balanced: {
      TruncationInfo info;
      run.model = balanced_truncation(sys, r, &info);
      run.warnings = info.warnings;
      break;
    }
  }
  if (run.trace)
    for (auto& e : run.trace->events) run.warnings.push_back(e);
  if (run.ph) run.model = ph_to_state_space(*run.ph);
  return run;
}

struct ErrorMetrics {
  double rel_h2 = std::numeric_limits<double>::quiet_NaN();
  std::string h2_method;
  double rel_hinf = std::numeric_limits<double>::quiet_NaN();
};

// relative H2 and approximate relative H-infinity errors; full_h2 may be
// passed in to avoid recomputing it per cell
inline ErrorMetrics error_metrics(const StateSpaceSystem& full, const StateSpaceSystem& reduced,
                                  const FrequencyGrid& grid, std::optional<double> full_h2 = std::nullopt,
                                  unsigned jobs = 1) {
  ErrorMetrics m;
  H2Value e = h2_error(full, reduced);
  double g = full_h2 ? *full_h2 : h2_norm_auto(full).value;
  m.rel_h2 = e.value / g;
  m.h2_method = e.method;
  m.rel_hinf = hinf_sampled_error(full, reduced, grid, jobs).relative();
  return m;
}

}  // namespace phred
