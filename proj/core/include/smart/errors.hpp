#pragma once

#include <stdexcept>

namespace smart {

/// Contract violation: bad shapes, invalid indices, malformed input.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values or otherwise unusable numerics.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace smart
