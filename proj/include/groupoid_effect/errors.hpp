#pragma once

#include <stdexcept>
#include <string>

namespace ge {

// Malformed caller input: dimension mismatches, bad configuration values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration that cannot be assembled into a model (e.g. mismatched
// rotation frequencies between a base groupoid and its kernel).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called outside its precondition (non-isotropic arrow
// passed where an isotropic one is required, etc).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrows that are not composable within tolerance.
class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrow components that violate the fibered-product conditions of their
// owning groupoid.
class MalformedArrowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear map does not carry the source longitudinal subspace into the
// target longitudinal subspace, so nothing descends to the quotients.
class NotWellDefinedError : public std::runtime_error {
 public:
  NotWellDefinedError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Raised when a quantity that theory guarantees fails numerically; signals
// a malformed model rather than a caller mistake.
class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ge
