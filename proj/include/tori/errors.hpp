#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tori/types.hpp"

namespace tori {

/// Base class of every solver error. `kind()` is a stable machine-readable tag
/// used by the CLI failure record.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define TORI_DECLARE_ERROR(Name, tag)                          \
  class Name : public Error {                                  \
   public:                                                     \
    using Error::Error;                                        \
    const char* kind() const noexcept override { return tag; } \
  };

TORI_DECLARE_ERROR(InvalidData, "invalid-data")
TORI_DECLARE_ERROR(ShapeMismatch, "shape-mismatch")
TORI_DECLARE_ERROR(DegenerateTorsion, "degenerate-torsion")
TORI_DECLARE_ERROR(DegenerateFamily, "degenerate-family")
TORI_DECLARE_ERROR(NonConvergence, "non-convergence")
TORI_DECLARE_ERROR(IntegrationFailure, "integration-failure")
TORI_DECLARE_ERROR(ConfigError, "config-error")

#undef TORI_DECLARE_ERROR

/// A cohomological equation whose right-hand side is not in the image of the
/// operator (nonzero average, or a k = 0 block outside the image form).
class UnsolvableEquation : public Error {
 public:
  UnsolvableEquation(const std::string& what, Real defect)
      : Error(what), defect_(defect) {}
  const char* kind() const noexcept override { return "unsolvable-equation"; }
  Real defect() const noexcept { return defect_; }

 private:
  Real defect_;
};

/// A per-mode block whose divisor fell below the configured floor.
class SmallDivisor : public Error {
 public:
  SmallDivisor(const std::string& what, std::vector<int> mode, Real divisor)
      : Error(what), mode_(std::move(mode)), divisor_(divisor) {}
  const char* kind() const noexcept override { return "small-divisor"; }
  const std::vector<int>& mode() const noexcept { return mode_; }
  Real divisor() const noexcept { return divisor_; }

 private:
  std::vector<int> mode_;
  Real divisor_;
};

/// The torus left the model's domain (for the pendula: a libration escaped |x| < pi).
class DomainEscape : public Error {
 public:
  DomainEscape(const std::string& what, std::size_t point)
      : Error(what), point_(point) {}
  const char* kind() const noexcept override { return "domain-escape"; }
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

/// Pointwise-singular G_LL or Omega_WW while assembling the adapted frame.
class DegenerateFrame : public Error {
 public:
  DegenerateFrame(const std::string& what, std::size_t point)
      : Error(what), point_(point) {}
  const char* kind() const noexcept override { return "degenerate-frame"; }
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

}  // namespace tori
