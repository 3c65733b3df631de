#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fecim {

/// Raised when a parameter block violates its invariants. Carries every
/// violation found, not just the first.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation attempted on an array whose capacitors still hold charge.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InsufficientSamplesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ParameterError if `diagnostics` is non-empty.
void throw_if_invalid(std::vector<std::string> diagnostics);

}  // namespace fecim
