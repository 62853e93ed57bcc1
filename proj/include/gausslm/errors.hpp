#pragma once

#include <stdexcept>
#include <string>

namespace gausslm {

enum class NumericErrorKind {
  NotIntegrable,  // the requested moment is infinite
  Divergent,      // a Monte Carlo estimate failed to stabilise
  Undefined,      // e.g. the moment of order zero
};

const char* to_string(NumericErrorKind kind);

/// Raised when a functional has no finite value (or no stable estimate).
/// Checks translate it into a VACUOUS verdict instead of a failure.
class NumericError : public std::runtime_error {
 public:
  NumericError(NumericErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  NumericErrorKind kind() const noexcept { return kind_; }

 private:
  NumericErrorKind kind_;
};

}  // namespace gausslm
