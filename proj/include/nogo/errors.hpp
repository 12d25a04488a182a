#pragma once

#include <stdexcept>
#include <string>

namespace nogo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands with incompatible dimensions.
struct DimensionMismatchError : Error {
  using Error::Error;
};

// A family passed to an operation that requires commutation does not commute.
struct NonCommutingError : Error {
  using Error::Error;
};

// A mathematical precondition other than commutation fails (non-unit vector,
// non-effect operator, colorable input to a lift, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// Malformed input files or parameter strings.
struct ParseError : Error {
  using Error::Error;
};

// A search exhausted its node budget before reaching a verdict that the
// caller required as a certificate.
struct BudgetExceededError : Error {
  using Error::Error;
};

}  // namespace nogo
