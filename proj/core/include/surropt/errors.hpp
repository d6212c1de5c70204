#pragma once

#include <stdexcept>
#include <string>

namespace surropt {

// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError / InputError -> 2, IoError -> 3, everything else -> 4.

/// Invalid experiment configuration or hyperparameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data handed to a public operation (shape mismatch, non-finite values).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver hit its iteration or size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition. Indicates a program bug.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An invariant that should hold by construction did not.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace surropt
