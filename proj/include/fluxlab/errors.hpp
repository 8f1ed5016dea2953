#ifndef FLUXLAB_ERRORS_HPP
#define FLUXLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fluxlab {

// Malformed or inconsistent inputs (bad dimensions, degenerate paths,
// unparseable configs). CLI maps these to exit code 2.
class InvalidInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A geometric predicate failed (point on path, proximity guard tripped).
class GeometryError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Valid input outside the domain a caller restricted to
// (e.g. path vertex inside the flux-tube core in core-exclusion mode).
class DomainError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Numerical failure at runtime (solver non-convergence, winding residual
// too large). CLI maps these to exit code 1.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fringe shift was requested from a pattern with no usable fringes.
class NoFringesError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace fluxlab

#endif
