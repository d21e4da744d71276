// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/types.hpp"
#include "phred/core/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace phred::mm {

// shortest decimal text that parses back to the same double
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, const std::string& path) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (!tok.empty() && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw IoError(path + ": cannot parse number '" + tok + "'");
  return v;
}

inline long long parse_index(const std::string& tok, const std::string& path) {
  long long v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw IoError(path + ": bad index '" + tok + "'");
  return v;
}

inline void write(const std::string& path, const SpMat& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      os << it.row() + 1 << " " << it.col() + 1 << " " << format_double(it.value()) << "\n";
  if (!os) throw IoError("write to " + path + " failed");
}

inline void write(const std::string& path, const Mat& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "%%MatrixMarket matrix array real general\n";
  os << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) os << format_double(m(i, j)) << "\n";
  if (!os) throw IoError("write to " + path + " failed");
}

struct Loaded {
  bool dense = false;
  SpMat sparse;
  Mat full;

  SpMat as_sparse() const { return dense ? SpMat(full.sparseView(0.0, 0.0)) : sparse; }
  Mat as_dense() const { return dense ? full : Mat(sparse); }
};

// Coordinate or array format, real or integer field, general or symmetric
// or skew-symmetric storage.
inline Loaded read(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError(path + ": empty file");
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") throw IoError(path + ": not a Matrix Market matrix");
  if (field != "real" && field != "integer" && field != "double")
    throw IoError(path + ": unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw IoError(path + ": unsupported symmetry '" + symmetry + "'");
  do {
    if (!std::getline(is, line)) throw IoError(path + ": missing size line");
  } while (line.empty() || line[0] == '%');
  std::istringstream ss(line);
  long long rows = -1, cols = -1, nnz = -1;
  ss >> rows >> cols;
  Loaded out;
  auto next_token = [&](std::string& tok) -> bool {
    while (true) {
      if (is >> tok) {
        if (tok[0] == '%') {
          std::getline(is, line);
          continue;
        }
        return true;
      }
      return false;
    }
  };
  if (format == "coordinate") {
    ss >> nnz;
    if (rows < 0 || cols < 0 || nnz < 0) throw IoError(path + ": bad size line");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(nnz));
    std::string a, b, v;
    for (long long k = 0; k < nnz; ++k) {
      if (!next_token(a) || !next_token(b) || !next_token(v)) throw IoError(path + ": truncated entries");
      long long i = parse_index(a, path) - 1, j = parse_index(b, path) - 1;
      if (i < 0 || j < 0 || i >= rows || j >= cols) throw IoError(path + ": entry index out of range");
      double x = parse_double(v, path);
      t.emplace_back(i, j, x);
      if (i != j && symmetry == "symmetric") t.emplace_back(j, i, x);
      if (i != j && symmetry == "skew-symmetric") t.emplace_back(j, i, -x);
    }
    out.sparse.resize(rows, cols);
    out.sparse.setFromTriplets(t.begin(), t.end());
    out.sparse.makeCompressed();
  } else if (format == "array") {
    if (rows < 0 || cols < 0) throw IoError(path + ": bad size line");
    if (symmetry != "general") throw IoError(path + ": only general array storage is supported");
    out.dense = true;
    out.full.resize(rows, cols);
    std::string v;
    for (long long j = 0; j < cols; ++j)
      for (long long i = 0; i < rows; ++i) {
        if (!next_token(v)) throw IoError(path + ": truncated entries");
        out.full(i, j) = parse_double(v, path);
      }
  } else {
    throw IoError(path + ": unknown format '" + format + "'");
  }
  return out;
}

}  // namespace phred::mm
