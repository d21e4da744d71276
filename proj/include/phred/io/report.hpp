// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"
#include "phred/io/matrix_market.hpp"
#include "phred/irka/certificates.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace phred {

using json = nlohmann::json;

// Non-finite doubles become null: JSON has no NaN.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

inline json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto z : v) a.push_back(to_json(z));
  return a;
}

inline json to_json(const CVec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline json to_json(const std::vector<CVec>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline json to_json(const InterpolationData& d) {
  return json{{"points", to_json(d.points)}, {"directions", to_json(d.directions)}};
}

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw IoError("complex numbers are stored as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline InterpolationData interpolation_data_from_json(const json& j) {
  try {
    std::vector<cplx> pts;
    std::vector<CVec> dirs;
    for (const auto& p : j.at("points")) pts.push_back(complex_from_json(p));
    for (const auto& d : j.at("directions")) {
      CVec v(static_cast<Index>(d.size()));
      for (std::size_t k = 0; k < d.size(); ++k) v(static_cast<Index>(k)) = complex_from_json(d[k]);
      dirs.push_back(v);
    }
    return make_interpolation_data(pts, dirs, Closure::check);
  } catch (const json::exception& e) {
    throw IoError(std::string("interpolation data: ") + e.what());
  }
}

inline InterpolationData read_interpolation_data(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return interpolation_data_from_json(j);
}

inline json to_json(const IrkaTrace& t) {
  json its = json::array();
  for (std::size_t k = 0; k < t.iterations.size(); ++k) {
    const auto& it = t.iterations[k];
    json e{{"iteration", k + 1},
           {"shifts", to_json(it.shifts)},
           {"directions", to_json(it.directions)},
           {"poles", to_json(it.poles)},
           {"shift_change", num(it.change)},
           {"spectral_abscissa", num(it.abscissa)},
           {"h2_offset", num(it.h2_offset)}};
    if (!it.left_directions.empty()) e["left_directions"] = to_json(it.left_directions);
    its.push_back(e);
  }
  std::vector<CVec> rows;
  for (Index k = 0; k < t.final_modal.F.rows(); ++k) rows.push_back(t.final_modal.F.row(k).transpose());
  return json{{"converged", t.converged},
              {"stop_reason", t.stop_reason},
              {"iterations", t.iterations.size()},
              {"events", t.events},
              {"final_poles", to_json(t.final_modal.poles)},
              {"final_residue_directions", to_json(rows)},
              {"final_interpolation_data", to_json(t.final_data)},
              {"trace", its}};
}

inline json to_json(const StructureReport& r) {
  return json{{"skew_J", num(r.skew_J)},           {"sym_R", num(r.sym_R)},
              {"sym_Q", num(r.sym_Q)},             {"lambda_min_R_rel", num(r.lambda_min_R)},
              {"lambda_min_Q_rel", num(r.lambda_min_Q)}, {"pivot_min_R_rel", num(r.pivot_min_R)},
              {"pivot_min_Q_rel", num(r.pivot_min_Q)},
              {"spectral_abscissa", num(r.abscissa)}, {"passes", passes_ph_invariants(r)}};
}

inline json to_json(const StabilityCertificate& c) {
  return json{{"sylvester_residual", num(c.sylvester_residual)},
              {"lyapunov_residual", num(c.lyapunov_residual)},
              {"spectral_abscissa", num(c.spectral_abscissa)},
              {"cond_K", num(c.cond_K)}};
}

inline json to_json(const OptimalityResiduals& r) {
  return json{{"res_b", to_json(r.res_b)}, {"res_c", to_json(r.res_c)}, {"res_h", to_json(r.res_h)},
              {"max_res_b", num(max_of(r.res_b))}, {"max_res_c", num(max_of(r.res_c))},
              {"max_res_h", num(max_of(r.res_h))}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

// RFC 4180 quoting when needed; numbers in shortest round-trip form
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_num(double v) { return std::isfinite(v) ? mm::format_double(v) : std::string("NaN"); }

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : path_(path), tmp_(path) {
    tmp_ += ".tmp";
    os_.open(tmp_);
    if (!os_) throw IoError("cannot write " + tmp_.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_field(cells[i]);
    os_ << "\r\n";
  }
  void close() {
    os_.close();
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::filesystem::path path_, tmp_;
  std::ofstream os_;
};

}  // namespace phred
