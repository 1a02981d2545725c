#pragma once

#include <stdexcept>
#include <string>

namespace freelyap {

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The point t equals the off-kernel mass r, where the marginal exponent is
/// left undefined.
class BoundaryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A method was requested on an input that does not satisfy its hypothesis
/// (for example the S-integral determinant of a non-invertible operator).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Measure data that violates a SpectralMeasure or ContinuousSegment invariant.
class InvalidMeasure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace freelyap
