// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/port_hamiltonian.hpp"
#include "phred/io/matrix_market.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace phred {

// A model on disk: one Matrix Market file per matrix plus manifest.json
// naming them. kind "ph" stores J, R, Q, B; kind "ss" stores E, A, B, C.
struct ModelOnDisk {
  std::optional<PortHamiltonianSystem> ph;
  StateSpaceSystem ss;
};

namespace detail {

inline void write_manifest(const std::filesystem::path& dir, const nlohmann::json& j) {
  std::filesystem::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace detail

inline void write_model(const std::filesystem::path& dir, const PortHamiltonianSystem& ph) {
  detail::ensure_dir(dir);
  mm::write((dir / "J.mtx").string(), ph.J);
  mm::write((dir / "R.mtx").string(), ph.R);
  mm::write((dir / "Q.mtx").string(), ph.Q);
  mm::write((dir / "B.mtx").string(), ph.B);
  nlohmann::json j{{"kind", "ph"},
                   {"n", ph.n()},
                   {"m", ph.m()},
                   {"files", {{"J", "J.mtx"}, {"R", "R.mtx"}, {"Q", "Q.mtx"}, {"B", "B.mtx"}}}};
  detail::write_manifest(dir, j);
}

inline void write_model(const std::filesystem::path& dir, const StateSpaceSystem& ss) {
  detail::ensure_dir(dir);
  mm::write((dir / "E.mtx").string(), ss.E);
  mm::write((dir / "A.mtx").string(), ss.A);
  mm::write((dir / "B.mtx").string(), ss.B);
  mm::write((dir / "C.mtx").string(), ss.C);
  nlohmann::json j{{"kind", "ss"},
                   {"n", ss.n()},
                   {"m", ss.m()},
                   {"p", ss.p()},
                   {"files", {{"E", "E.mtx"}, {"A", "A.mtx"}, {"B", "B.mtx"}, {"C", "C.mtx"}}}};
  detail::write_manifest(dir, j);
}

// path may be the manifest itself or the directory holding manifest.json;
// with validate = false a ph model is loaded as stored, without the
// structural checks (for reporting on a possibly broken model)
inline ModelOnDisk read_model(const std::filesystem::path& path, bool validate = true) {
  std::filesystem::path manifest = std::filesystem::is_directory(path) ? path / "manifest.json" : path;
  std::ifstream is(manifest);
  if (!is) throw IoError("cannot open manifest " + manifest.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest.string() + ": " + e.what());
  }
  const std::filesystem::path dir = manifest.parent_path();
  auto file = [&](const char* key) -> std::string {
    if (!j.contains("files") || !j["files"].contains(key)) throw IoError(manifest.string() + ": missing file for " + key);
    return (dir / j["files"][key].get<std::string>()).string();
  };
  const std::string kind = j.value("kind", "ph");
  ModelOnDisk out;
  if (kind == "ph") {
    SpMat J = mm::read(file("J")).as_sparse(), R = mm::read(file("R")).as_sparse(), Q = mm::read(file("Q")).as_sparse();
    Mat B = mm::read(file("B")).as_dense();
    if (validate) {
      out.ph = build_ph(J, R, Q, B);
    } else {
      if (J.rows() != J.cols() || R.rows() != J.rows() || R.cols() != J.rows() || Q.rows() != J.rows() ||
          Q.cols() != J.rows() || B.rows() != J.rows())
        throw DimensionMismatch(manifest.string() + ": J, R, Q, B sizes disagree");
      out.ph = PortHamiltonianSystem{J, R, Q, B};
    }
    out.ss = ph_to_state_space(*out.ph);
  } else if (kind == "ss") {
    out.ss = make_state_space(mm::read(file("E")).as_sparse(), mm::read(file("A")).as_sparse(),
                              mm::read(file("B")).as_dense(), mm::read(file("C")).as_dense());
  } else {
    throw IoError(manifest.string() + ": unknown model kind '" + kind + "'");
  }
  if (j.contains("n") && j["n"].get<Index>() != out.ss.n())
    throw IoError(manifest.string() + ": declared n does not match the matrices");
  if (j.contains("m") && j["m"].get<Index>() != out.ss.m())
    throw IoError(manifest.string() + ": declared m does not match the matrices");
  return out;
}

}  // namespace phred
