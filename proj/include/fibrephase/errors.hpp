#pragma once

#include <stdexcept>

namespace fibrephase {

/// Rejected input: out-of-range parameters, malformed configs, mismatched spaces.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical guard refused to proceed (step size too coarse, phase ill-conditioned).
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fibrephase
