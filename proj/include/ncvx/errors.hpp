#pragma once

#include <stdexcept>
#include <string>

namespace ncvx {

/// Bad argument or configuration value (negative lambda, q outside (0,1), ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not line up.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The q-shrinkage rule has no closed-form penalty to evaluate.
class PenaltyUnavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// NaN/Inf encountered or a factorization failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ncvx
