// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: model generation, reduction, comparison sweeps,
// time and frequency analysis, and model validation.

#include "phred/phred.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using phred::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// configuration problems (bad flags, bad files) as opposed to numerical ones
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values as given on the command line; each one that was set
// overrides the corresponding config-file key.
struct Flags {
  std::string config, method, order, orders, init, grid, signal, tol_shift, max_iter, stagnation, jobs, seed, out,
      model, family, n, t_end, samples, rtol, atol, reduced;
  bool method_given = false;  // distinguishes --method "" from no flag
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its keys");
  app->add_option("--method", f.method, "reduction method(s), comma separated");
  app->add_option("--order", f.order, "reduction order r");
  app->add_option("--orders", f.orders, "order sweep A:STEP:B");
  app->add_option("--init", f.init, "logspace:LO:HI | lhp-logspace:LO:HI | complex-grid | random:LO:HI | "
                                    "perturbed-poles:EPS | reflected-poles | file:PATH");
  app->add_option("--grid", f.grid, "frequency grid logspace:LO:HI:N");
  app->add_option("--signal", f.signal, "decaying:ALPHA:BETA | square:PERIOD | zero");
  app->add_option("--tol-shift", f.tol_shift, "IRKA shift tolerance");
  app->add_option("--max-iter", f.max_iter, "IRKA iteration limit");
  app->add_option("--stagnation-window", f.stagnation, "IRKA stagnation window");
  app->add_option("--jobs", f.jobs, "worker threads");
  app->add_option("--seed", f.seed, "seed for randomized initializations");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--model", f.model, "model directory or manifest");
  app->add_option("--family", f.family, "generated model family: msd | ladder");
  app->add_option("--n", f.n, "generated model dimension");
  app->add_option("--t-end", f.t_end, "simulation end time");
  app->add_option("--samples", f.samples, "simulation output samples");
  app->add_option("--rtol", f.rtol, "integrator relative tolerance");
  app->add_option("--atol", f.atol, "integrator absolute tolerance");
  app->add_option("--reduced", f.reduced, "reduced model directories, comma separated");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(what + ": '" + s + "' is not an integer");
  return v;
}

// The merged configuration: config file first, then command-line flags.
class Config {
 public:
  Config(const Flags& f) {
    if (!f.config.empty()) {
      std::ifstream is(f.config);
      if (!is) throw ConfigError("cannot open config " + f.config);
      try {
        is >> j_;
      } catch (const json::exception& e) {
        throw ConfigError(f.config + ": " + e.what());
      }
      if (!j_.is_object()) throw ConfigError(f.config + ": config must be a JSON object");
      base_ = fs::path(f.config).parent_path();
    }
    // the two model sources are exclusive; a flag for one drops the other
    if (!f.model.empty()) {
      j_.erase("family");
      j_.erase("n");
      j_.erase("params");
      j_["model"] = f.model;
      model_from_flag_ = true;
    }
    if (!f.family.empty()) {
      j_.erase("model");
      j_["family"] = f.family;
    }
    auto set_num = [&](const std::string& v, const char* key) {
      if (!v.empty()) j_[key] = to_double(v, std::string("--") + key);
    };
    auto set_int = [&](const std::string& v, const char* key) {
      if (!v.empty()) j_[key] = to_int(v, std::string("--") + key);
    };
    auto set_str = [&](const std::string& v, const char* key) {
      if (!v.empty()) j_[key] = v;
    };
    if (f.method_given) j_["method"] = split(f.method, ',');
    if (!f.reduced.empty()) {
      j_["reduced"] = split(f.reduced, ',');
      reduced_from_flag_ = true;
    }
    set_int(f.n, "n");
    set_int(f.order, "order");
    set_str(f.orders, "orders");
    set_str(f.init, "init");
    init_from_flag_ = !f.init.empty();
    set_str(f.grid, "grid");
    set_str(f.signal, "signal");
    set_num(f.tol_shift, "tol_shift");
    set_int(f.max_iter, "max_iter");
    set_int(f.stagnation, "stagnation_window");
    set_int(f.jobs, "jobs");
    set_int(f.seed, "seed");
    set_str(f.out, "out");
    set_num(f.t_end, "t_end");
    set_int(f.samples, "samples");
    set_num(f.rtol, "rtol");
    set_num(f.atol, "atol");
    if (j_.contains("order") && j_.contains("orders")) throw ConfigError("give either order or orders, not both");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_[key].is_null(); }
  const json& raw() const { return j_; }

  template <class T>
  T get(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return j_[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  }

  std::string str(const char* key) const {
    if (!has(key)) throw ConfigError(std::string("missing required setting '") + key + "'");
    return get<std::string>(key, "");
  }

  // relative paths in the config file resolve against its directory
  fs::path path(const char* key, bool from_flag) const {
    fs::path p = str(key);
    return from_flag || p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  bool model_from_flag() const { return model_from_flag_; }
  bool reduced_from_flag() const { return reduced_from_flag_; }
  bool init_from_flag() const { return init_from_flag_; }
  fs::path resolve(const std::string& s, bool from_flag) const {
    fs::path p = s;
    return from_flag || p.is_absolute() || base_.empty() ? p : base_ / p;
  }

 private:
  json j_ = json::object();
  fs::path base_;
  bool model_from_flag_ = false;
  bool reduced_from_flag_ = false;
  bool init_from_flag_ = false;
};

std::vector<double> number_list(const json& v, const char* what) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(std::string(what) + " must be a number or an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

struct LoadedModel {
  std::optional<phred::PortHamiltonianSystem> ph;
  phred::StateSpaceSystem ss;
  json source;
};

phred::PortHamiltonianSystem generate(const Config& c) {
  const std::string family = c.str("family");
  if (!c.has("n")) throw ConfigError("generated models need n");
  const auto n = c.get<phred::Index>("n", 0);
  json params = c.has("params") ? c.raw()["params"] : json::object();
  auto take = [&](const char* key, std::vector<double>& dst) {
    if (params.contains(key)) dst = number_list(params[key], key);
  };
  if (family == "msd") {
    phred::MsdParams p;
    p.n = n;
    take("masses", p.masses);
    take("stiffness", p.stiffness);
    take("damping", p.damping);
    return phred::build_msd(p);
  }
  if (family == "ladder") {
    phred::LadderParams p;
    p.n = n;
    take("capacitance", p.capacitance);
    take("inductance", p.inductance);
    take("resistance", p.resistance);
    return phred::build_ladder(p);
  }
  throw ConfigError("unknown model family '" + family + "' (msd or ladder)");
}

LoadedModel load_model(const Config& c) {
  const bool file = c.has("model"), gen = c.has("family");
  if (file == gen) throw ConfigError("exactly one model source is needed: model PATH or family + n");
  LoadedModel m;
  if (file) {
    fs::path p = c.path("model", c.model_from_flag());
    auto disk = phred::read_model(p);
    m.ph = disk.ph;
    m.ss = disk.ss;
    m.source = {{"model", p.string()}};
  } else {
    m.ph = generate(c);
    m.ss = phred::ph_to_state_space(*m.ph);
    m.source = {{"family", c.str("family")}, {"n", m.ss.n()}};
    if (c.has("params")) m.source["params"] = c.raw()["params"];
  }
  return m;
}

std::vector<phred::Method> methods(const Config& c, const char* fallback) {
  json v = c.has("method") ? c.raw()["method"] : json(fallback);
  std::vector<std::string> names;
  if (v.is_string()) {
    names = split(v.get<std::string>(), ',');
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError("method list must hold names");
      names.push_back(x.get<std::string>());
    }
  } else {
    throw ConfigError("method must be a name or a list of names");
  }
  std::vector<phred::Method> out;
  for (const auto& s : names) {
    if (s.empty()) continue;
    try {
      out.push_back(phred::parse_method(s));
    } catch (const phred::BadParams& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

std::vector<phred::Index> orders(const Config& c, phred::Index n) {
  std::vector<phred::Index> out;
  if (c.has("orders")) {
    auto parts = split(c.str("orders"), ':');
    if (parts.size() != 3) throw ConfigError("orders must be A:STEP:B");
    long long a = to_int(parts[0], "orders"), step = to_int(parts[1], "orders"), b = to_int(parts[2], "orders");
    if (step < 1 || a < 1 || b < a) throw ConfigError("orders must satisfy 1 <= A <= B and STEP >= 1");
    for (long long r = a; r <= b; r += step) out.push_back(r);
  } else if (c.has("order")) {
    out.push_back(c.get<phred::Index>("order", 0));
  } else {
    throw ConfigError("missing required setting 'order' (or 'orders')");
  }
  for (auto r : out) {
    if (r < 1) throw ConfigError("reduction order must be >= 1");
    if (r >= n) throw ConfigError("reduction order must be < n");
  }
  return out;
}

phred::InitSpec init_spec(const Config& c) {
  std::string text = c.get<std::string>("init", "logspace:1e-3:1e-1");
  phred::InitSpec s;
  try {
    s = phred::parse_init(text);
  } catch (const phred::BadParams& e) {
    throw ConfigError(e.what());
  }
  s.seed = c.get<std::uint64_t>("seed", 0);
  if (s.kind == phred::InitKind::file) {
    fs::path p = c.resolve(text.substr(5), c.init_from_flag());
    s.data = phred::read_interpolation_data(p);
  }
  return s;
}

phred::IrkaOptions irka_options(const Config& c) {
  phred::IrkaOptions o;
  o.shift_tolerance = c.get<double>("tol_shift", o.shift_tolerance);
  o.max_iterations = c.get<int>("max_iter", o.max_iterations);
  o.stagnation_window = c.get<int>("stagnation_window", o.stagnation_window);
  if (o.max_iterations < 1) throw ConfigError("max_iter must be >= 1");
  if (!(o.shift_tolerance > 0.0)) throw ConfigError("tol_shift must be positive");
  if (o.stagnation_window < 2) throw ConfigError("stagnation_window must be >= 2");
  return o;
}

unsigned jobs(const Config& c) {
  long long j = c.get<long long>("jobs", 1);
  if (j < 1) throw ConfigError("jobs must be >= 1");
  return static_cast<unsigned>(j);
}

phred::FrequencyGrid grid(const Config& c) {
  if (!c.has("grid")) return phred::default_grid();
  auto parts = split(c.str("grid"), ':');
  if (parts.size() != 4 || parts[0] != "logspace") throw ConfigError("grid must be logspace:LO:HI:N");
  double lo = to_double(parts[1], "grid"), hi = to_double(parts[2], "grid");
  long long count = to_int(parts[3], "grid");
  if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count > 1 && !(hi > lo)))
    throw ConfigError("grid needs 0 < LO < HI and N >= 1");
  return phred::logspace_grid(lo, hi, count);
}

phred::InputSignal signal(const Config& c) {
  auto parts = split(c.get<std::string>("signal", "decaying:0.05:5"), ':');
  phred::SignalParams p;
  p.channel = c.get<phred::Index>("input_channel", 0);
  try {
    if (parts[0] == "decaying") {
      if (parts.size() != 3) throw ConfigError("signal decaying needs ALPHA:BETA");
      p.alpha = to_double(parts[1], "signal");
      p.beta = to_double(parts[2], "signal");
      return phred::make_signal(phred::SignalKind::decaying_sinusoid, p);
    }
    if (parts[0] == "square") {
      if (parts.size() != 2) throw ConfigError("signal square needs PERIOD");
      p.period = to_double(parts[1], "signal");
      return phred::make_signal(phred::SignalKind::square_wave, p);
    }
    if (parts[0] == "zero") {
      if (parts.size() != 1) throw ConfigError("signal zero takes no parameters");
      return phred::make_signal(phred::SignalKind::zero, p);
    }
  } catch (const phred::BadParams& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown signal '" + parts[0] + "'");
}

fs::path out_dir(const Config& c) {
  fs::path p = c.str("out");
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

json warnings_json(const std::vector<std::string>& w) { return json(w); }

// report fields shared by reduce and the per-cell compare output
json run_json(const phred::MethodRun& run) {
  json j{{"method", phred::to_string(run.method)},
         {"r", run.r},
         {"converged", run.converged},
         {"iterations", run.iterations},
         {"warnings", warnings_json(run.warnings)}};
  if (!run.converged) j["best_iteration"] = run.best_iteration;
  if (run.trace) j["irka"] = phred::to_json(*run.trace);
  if (run.data) j["interpolation_data"] = phred::to_json(*run.data);
  return j;
}

// ---------------------------------------------------------------- model

int cmd_model(const Config& c) {
  if (c.has("model")) throw ConfigError("model generates from family + n; it does not read a model");
  auto ph = generate(c);
  fs::path out = out_dir(c);
  phred::write_model(out, ph);
  std::cout << "wrote " << c.str("family") << " model with n = " << ph.n() << " to " << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- reduce

int cmd_reduce(const Config& c) {
  auto ms = methods(c, "irka_ph");
  if (ms.size() != 1) throw ConfigError("reduce takes exactly one method");
  auto model = load_model(c);
  auto rs = orders(c, model.ss.n());
  if (rs.size() != 1) throw ConfigError("reduce takes a single order");
  const phred::Method method = ms[0];
  if (phred::preserves_structure(method) && !model.ph)
    throw ConfigError(std::string(phred::to_string(method)) + " needs a port-Hamiltonian model");
  const auto init = init_spec(c);
  auto opts = irka_options(c);
  opts.jobs = jobs(c);
  const phred::FrequencyGrid g = grid(c);
  fs::path out = out_dir(c);

  phred::MethodRun run;
  if (model.ph) {
    run = phred::run_method(*model.ph, method, rs[0], init, opts);
  } else {
    // unstructured input: only the unstructured methods apply
    run.method = method;
    run.r = rs[0];
    if (method == phred::Method::balanced) {
      phred::TruncationInfo info;
      run.model = phred::balanced_truncation(model.ss, rs[0], &info);
      run.warnings = info.warnings;
    } else {
      try {
        auto res = phred::irka_general(model.ss, phred::make_init(model.ss, rs[0], init), opts);
        run.model = res.model;
        run.iterations = static_cast<int>(res.trace.iterations.size());
        run.trace = res.trace;
      } catch (const phred::MaxIterationsExceeded& e) {
        run.converged = false;
        run.iterations = static_cast<int>(e.trace().iterations.size());
        run.best_iteration = e.best_iteration();
        run.trace = e.trace();
        run.model = *e.best_ss();
        run.warnings.push_back(e.what());
      }
    }
  }
  if (run.ph)
    phred::write_model(out, *run.ph);
  else
    phred::write_model(out, run.model);

  json rep = run_json(run);
  rep["source"] = model.source;
  rep["n"] = model.ss.n();
  if (run.ph) rep["structure"] = phred::to_json(phred::structure_report(*run.ph));
  rep["spectral_abscissa"] = phred::num(phred::spectral_abscissa(run.model));
  try {
    auto m = phred::error_metrics(model.ss, run.model, g, std::nullopt, opts.jobs);
    rep["errors"] = {{"rel_h2", phred::num(m.rel_h2)}, {"h2_method", m.h2_method},
                     {"rel_hinf_sampled", phred::num(m.rel_hinf)}, {"grid_points", g.omegas.size()}};
  } catch (const phred::Error& e) {
    rep["errors"] = {{"failed", std::string(e.name()) + ": " + e.what()}};
  }
  if (run.trace && run.converged) {
    try {
      rep["h2_optimality"] = phred::to_json(phred::h2_optimality_residuals(model.ss, run.model));
    } catch (const phred::Error& e) {
      rep["h2_optimality"] = {{"failed", std::string(e.name()) + ": " + e.what()}};
    }
    if (run.ph) {
      try {
        rep["certificate"] = phred::to_json(phred::stability_certificate(*model.ph, *run.trace, run.trace->basis));
      } catch (const phred::Error& e) {
        rep["certificate"] = {{"failed", std::string(e.name()) + ": " + e.what()}};
      }
    }
  }
  phred::write_json(out / "report.json", rep);
  std::cout << phred::to_string(method) << " r = " << run.r << (run.converged ? "" : " (not converged)")
            << ", report in " << (out / "report.json").string() << "\n";
  if (!run.converged) {
    std::cerr << "phred: " << run.warnings.front() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct Cell {
  phred::Method method;
  phred::Index r;
  std::string status = "failed";  // ok | not_converged | failed
  std::string reason;
  double rel_h2 = std::numeric_limits<double>::quiet_NaN();
  double rel_hinf = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  json detail;
};

int cmd_compare(const Config& c) {
  auto ms = methods(c, "irka_ph,one_step,effort_bal");
  auto model = load_model(c);
  if (!model.ph) throw ConfigError("compare needs a port-Hamiltonian model");
  auto rs = orders(c, model.ss.n());
  const auto init = init_spec(c);
  const auto opts = irka_options(c);
  const phred::FrequencyGrid g = grid(c);
  const unsigned nj = jobs(c);
  fs::path out = out_dir(c);
  fs::path cells_dir = out / "cells";
  fs::create_directories(cells_dir);

  double full_h2 = std::numeric_limits<double>::quiet_NaN();
  std::string full_h2_method;
  try {
    auto h = phred::h2_norm_auto(model.ss);
    full_h2 = h.value;
    full_h2_method = h.method;
  } catch (const phred::Error& e) {
    std::cerr << "phred: H2 norm of the full model failed: " << e.what() << "\n";
  }

  std::vector<Cell> cells;
  for (auto r : rs)
    for (auto m : ms) cells.push_back(Cell{m, r});
  phred::parallel_for(
      cells.size(),
      [&](std::size_t i) {
        Cell& cell = cells[i];
        try {
          auto run = phred::run_method(*model.ph, cell.method, cell.r, init, opts);
          cell.iterations = run.iterations;
          cell.detail = run_json(run);
          auto met = phred::error_metrics(model.ss, run.model, g, std::isfinite(full_h2) ? std::optional(full_h2)
                                                                                           : std::nullopt);
          cell.rel_h2 = met.rel_h2;
          cell.rel_hinf = met.rel_hinf;
          cell.detail["h2_method"] = met.h2_method;
          if (run.ph) cell.detail["structure"] = phred::to_json(phred::structure_report(*run.ph));
          cell.status = run.converged ? "ok" : "not_converged";
          if (!run.converged) cell.reason = "best iterate " + std::to_string(run.best_iteration) + " of " +
                                            std::to_string(run.iterations) + " (" + run.trace->stop_reason + ")";
        } catch (const phred::Error& e) {
          cell.status = "failed";
          cell.reason = std::string(e.name()) + ": " + e.what();
          cell.rel_h2 = cell.rel_hinf = std::numeric_limits<double>::quiet_NaN();
        }
        cell.detail["status"] = cell.status;
        cell.detail["reason"] = cell.reason;
        cell.detail["rel_h2"] = phred::num(cell.rel_h2);
        cell.detail["rel_hinf_sampled"] = phred::num(cell.rel_hinf);
        phred::write_json(cells_dir / (std::string(phred::to_string(cell.method)) + "_r" + std::to_string(cell.r) +
                                       ".json"),
                          cell.detail);
      },
      nj);

  phred::CsvWriter csv(out / "compare.csv");
  csv.row({"r", "method", "rel_h2", "rel_hinf_sampled", "iterations", "status", "reason"});
  json rows = json::array();
  std::size_t succeeded = 0;
  for (const auto& cell : cells) {
    if (cell.status != "failed") ++succeeded;
    csv.row({std::to_string(cell.r), phred::to_string(cell.method), phred::csv_num(cell.rel_h2),
             phred::csv_num(cell.rel_hinf), std::to_string(cell.iterations), cell.status, cell.reason});
    rows.push_back(cell.detail);
  }
  csv.close();
  json rep{{"source", model.source},
           {"n", model.ss.n()},
           {"full_h2", phred::num(full_h2)},
           {"full_h2_method", full_h2_method},
           {"grid_points", g.omegas.size()},
           {"cells", rows}};
  phred::write_json(out / "report.json", rep);
  std::cout << succeeded << " of " << cells.size() << " cells succeeded, table in " << (out / "compare.csv").string()
            << "\n";
  return succeeded > 0 ? kExitOk : kExitNumerical;
}

// ------------------------------------------------- reduced models for analysis

struct Labeled {
  std::string label;
  std::optional<phred::PortHamiltonianSystem> ph;
  phred::StateSpaceSystem ss;
};

// reduced models named by --method (computed at --order) and by --reduced
std::vector<Labeled> reduced_models(const Config& c, const LoadedModel& full) {
  std::vector<Labeled> out;
  if (c.has("method")) {
    auto ms = methods(c, "");
    auto rs = orders(c, full.ss.n());
    if (rs.size() != 1) throw ConfigError("analysis commands take a single order");
    if (!full.ph) throw ConfigError("computing reduced models needs a port-Hamiltonian model");
    const auto init = init_spec(c);
    auto opts = irka_options(c);
    opts.jobs = jobs(c);
    for (auto m : ms) {
      auto run = phred::run_method(*full.ph, m, rs[0], init, opts);
      if (!run.converged) std::cerr << "phred: " << phred::to_string(m) << ": " << run.warnings.front() << "\n";
      out.push_back({phred::to_string(m), run.ph, run.model});
    }
  }
  if (c.has("reduced")) {
    const json& v = c.raw()["reduced"];
    std::vector<std::string> dirs;
    if (v.is_string())
      dirs = split(v.get<std::string>(), ',');
    else if (v.is_array())
      for (const auto& x : v) dirs.push_back(x.get<std::string>());
    else
      throw ConfigError("reduced must be a path or a list of paths");
    for (const auto& d : dirs) {
      fs::path p = c.resolve(d, c.reduced_from_flag());
      auto disk = phred::read_model(p);
      if (disk.ss.m() != full.ss.m() || disk.ss.p() != full.ss.p())
        throw ConfigError(p.string() + ": input/output sizes differ from the full model");
      std::string label = p.filename().empty() ? p.parent_path().filename().string() : p.filename().string();
      out.push_back({label, disk.ph, disk.ss});
    }
  }
  return out;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Config& c) {
  auto full = load_model(c);
  auto models = reduced_models(c, full);
  const auto input = signal(c);
  const double t_end = c.get<double>("t_end", 50.0);
  phred::SimOptions so;
  so.rtol = c.get<double>("rtol", so.rtol);
  so.atol = c.get<double>("atol", so.atol);
  so.samples = c.get<phred::Index>("samples", so.samples);
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (so.samples < 2) throw ConfigError("samples must be >= 2");
  if (!(so.rtol > 0.0) || !(so.atol > 0.0)) throw ConfigError("rtol and atol must be positive");
  if (input.channel >= full.ss.m()) throw ConfigError("input channel exceeds the number of inputs");
  fs::path out = out_dir(c);

  auto energy = [](const std::optional<phred::PortHamiltonianSystem>& ph, const phred::Trajectory& tr) {
    json j{{"supplied_energy", phred::num(tr.supplied_energy)}, {"steps", tr.steps}};
    if (ph) j["passivity_margin"] = phred::num(phred::passivity_margin(*ph, tr));
    return j;
  };

  auto tf = phred::simulate(full.ss, input, t_end, so);
  std::vector<phred::Trajectory> trs;
  for (const auto& m : models) trs.push_back(phred::simulate(m.ss, input, t_end, so));

  const phred::Index p = full.ss.p();
  phred::CsvWriter csv(out / "trajectories.csv");
  std::vector<std::string> head{"t"};
  for (phred::Index i = 0; i < p; ++i) head.push_back("full_y" + std::to_string(i + 1));
  for (const auto& m : models)
    for (phred::Index i = 0; i < p; ++i) head.push_back(m.label + "_y" + std::to_string(i + 1));
  csv.row(head);
  for (phred::Index k = 0; k < tf.times.size(); ++k) {
    std::vector<std::string> row{phred::csv_num(tf.times(k))};
    for (phred::Index i = 0; i < p; ++i) row.push_back(phred::csv_num(tf.outputs(i, k)));
    for (const auto& tr : trs)
      for (phred::Index i = 0; i < p; ++i) row.push_back(phred::csv_num(tr.outputs(i, k)));
    csv.row(row);
  }
  csv.close();

  json summary{{"source", full.source},
               {"signal", c.get<std::string>("signal", "decaying:0.05:5")},
               {"input_channel", input.channel + 1},
               {"t_end", t_end},
               {"rtol", so.rtol},
               {"atol", so.atol},
               {"samples", so.samples},
               {"full", energy(full.ph, tf)}};
  json list = json::array();
  for (std::size_t k = 0; k < models.size(); ++k) {
    std::vector<double> err(static_cast<std::size_t>(p));
    for (phred::Index i = 0; i < p; ++i)
      err[static_cast<std::size_t>(i)] = (tf.outputs.row(i) - trs[k].outputs.row(i)).cwiseAbs().maxCoeff();
    json e = energy(models[k].ph, trs[k]);
    e["label"] = models[k].label;
    e["r"] = models[k].ss.n();
    e["max_abs_error"] = phred::to_json(err);
    list.push_back(e);
  }
  summary["models"] = list;
  phred::write_json(out / "summary.json", summary);
  for (const auto& e : list)
    std::cout << e["label"].get<std::string>() << ": max |y1 - y1_r| = " << e["max_abs_error"][0] << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- freq

int cmd_freq(const Config& c) {
  auto full = load_model(c);
  auto models = reduced_models(c, full);
  const phred::FrequencyGrid g = grid(c);
  const unsigned nj = jobs(c);
  fs::path out = out_dir(c);

  std::vector<std::pair<std::string, phred::StateSpaceSystem>> systems{{"full", full.ss}};
  for (const auto& m : models) systems.emplace_back(m.label, m.ss);
  for (const auto& m : models) systems.emplace_back("error_" + m.label, phred::error_system(full.ss, m.ss));

  const phred::Index p = full.ss.p(), mi = full.ss.m();
  phred::CsvWriter csv(out / "freq.csv");
  std::vector<std::string> head{"model", "omega", "sigma"};
  for (phred::Index i = 0; i < p; ++i)
    for (phred::Index j = 0; j < mi; ++j) head.push_back("phase_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  csv.row(head);
  json peaks = json::object();
  for (const auto& [label, sys] : systems) {
    auto table = phred::frequency_response(sys, g, nj);
    for (phred::Index k = 0; k < table.omegas.size(); ++k) {
      std::vector<std::string> row{label, phred::csv_num(table.omegas(k)), phred::csv_num(table.sigma(k))};
      for (phred::Index q = 0; q < table.phase.cols(); ++q) row.push_back(phred::csv_num(table.phase(k, q)));
      csv.row(row);
    }
    peaks[label] = phred::num(table.sigma.maxCoeff());
  }
  csv.close();
  json rep{{"source", full.source}, {"grid_points", g.omegas.size()}, {"sigma_peak", peaks}};
  json rel = json::object();
  for (const auto& m : models)
    rel[m.label] = phred::num(peaks["error_" + m.label].get<double>() / peaks["full"].get<double>());
  rep["rel_hinf_sampled"] = rel;
  phred::write_json(out / "summary.json", rep);
  std::cout << systems.size() << " responses on " << g.omegas.size() << " frequencies, table in "
            << (out / "freq.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const Config& c) {
  json rep;
  bool ok = true;
  phred::StateSpaceSystem ss;
  if (c.has("model") && !c.has("family")) {
    fs::path p = c.path("model", c.model_from_flag());
    auto disk = phred::read_model(p, false);
    rep["source"] = {{"model", p.string()}};
    if (disk.ph) {
      auto s = phred::structure_report(*disk.ph);
      rep["structure"] = phred::to_json(s);
      ok = phred::passes_ph_invariants(s);
    }
    ss = disk.ss;
  } else {
    auto m = load_model(c);
    rep["source"] = m.source;
    auto s = phred::structure_report(*m.ph);
    rep["structure"] = phred::to_json(s);
    ok = phred::passes_ph_invariants(s);
    ss = m.ss;
  }
  rep["n"] = ss.n();
  rep["m"] = ss.m();
  rep["p"] = ss.p();
  if (ss.n() <= phred::dense_ceiling()) {
    double a = phred::spectral_abscissa(ss);
    rep["spectral_abscissa"] = phred::num(a);
    rep["asymptotically_stable"] = a < 0.0;
    ok = ok && a < 0.0;
  }
  rep["valid"] = ok;
  if (c.has("out")) phred::write_json(out_dir(c) / "validate.json", rep);
  std::cout << rep.dump(2) << "\n";
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phred: structure-preserving model reduction for port-Hamiltonian systems"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, int (*)(const Config&)> verbs{{"model", cmd_model},       {"reduce", cmd_reduce},
                                                      {"compare", cmd_compare},   {"simulate", cmd_simulate},
                                                      {"freq", cmd_freq},         {"validate", cmd_validate}};
  std::map<std::string, const char*> help{
      {"model", "generate a benchmark model and write it as Matrix Market files"},
      {"reduce", "reduce a model with one method"},
      {"compare", "sweep methods and orders, tabulate relative errors"},
      {"simulate", "simulate full and reduced models, report output errors"},
      {"freq", "sigma and phase responses of full, reduced and error systems"},
      {"validate", "check structural invariants and stability of a model"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : verbs) {
    auto* sub = app.add_subcommand(name, help[name]);
    add_flags(sub, flags);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    for (auto* sub : subs) {
      if (!sub->parsed()) continue;
      flags.method_given = sub->count("--method") > 0;
      return verbs[sub->get_name()](Config(flags));
    }
  } catch (const ConfigError& e) {
    std::cerr << "phred: " << e.what() << "\n";
    return kExitConfig;
  } catch (const phred::IoError& e) {
    std::cerr << "phred: IoError: " << e.what() << "\n";
    return kExitConfig;
  } catch (const phred::BadParams& e) {
    std::cerr << "phred: BadParams: " << e.what() << "\n";
    return kExitConfig;
  } catch (const phred::Error& e) {
    std::cerr << "phred: " << e.name() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "phred: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "phred: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
