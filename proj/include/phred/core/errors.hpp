// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace phred {

// Every failure raised by the library derives from Error. name() is the
// stable identifier the CLI prints next to the message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* name() const noexcept { return "Error"; }
};

#define PHRED_DEFINE_ERROR(Type)                                        \
  class Type : public Error {                                           \
   public:                                                              \
    explicit Type(const std::string& what) : Error(what) {}             \
    const char* name() const noexcept override { return #Type; }        \
  };

PHRED_DEFINE_ERROR(SingularTransform)
PHRED_DEFINE_ERROR(RankDeficient)
PHRED_DEFINE_ERROR(NotConjugateClosed)
PHRED_DEFINE_ERROR(CoincidentPoints)
PHRED_DEFINE_ERROR(SingularReducedPencil)
PHRED_DEFINE_ERROR(DefectiveEigenproblem)
PHRED_DEFINE_ERROR(RepeatedPoles)
PHRED_DEFINE_ERROR(NotConverged)
PHRED_DEFINE_ERROR(UnstableMatrix)
PHRED_DEFINE_ERROR(SizeLimitExceeded)
PHRED_DEFINE_ERROR(SingularSchurBlock)
PHRED_DEFINE_ERROR(DimensionMismatch)
PHRED_DEFINE_ERROR(StepSizeUnderflow)
PHRED_DEFINE_ERROR(NonFiniteState)
PHRED_DEFINE_ERROR(BadParams)
PHRED_DEFINE_ERROR(IoError)

#undef PHRED_DEFINE_ERROR

enum class StructureKind { skewness, psd, pd, dimension, finiteness };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::skewness: return "skewness";
    case StructureKind::psd: return "PSD";
    case StructureKind::pd: return "PD";
    case StructureKind::dimension: return "dimension";
    case StructureKind::finiteness: return "finiteness";
  }
  return "?";
}

class StructureViolation : public Error {
 public:
  StructureViolation(StructureKind kind, const std::string& what)
      : Error(std::string("structure violation (") + to_string(kind) + "): " + what), kind_(kind) {}
  StructureKind kind() const noexcept { return kind_; }
  const char* name() const noexcept override { return "StructureViolation"; }

 private:
  StructureKind kind_;
};

// index is the offending interpolation point, or -1 when not tied to one
class SingularPencil : public Error {
 public:
  explicit SingularPencil(const std::string& what, int index = -1) : Error(what), index_(index) {}
  int index() const noexcept { return index_; }
  const char* name() const noexcept override { return "SingularPencil"; }

 private:
  int index_;
};

}  // namespace phred
