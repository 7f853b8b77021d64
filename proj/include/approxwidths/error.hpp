#pragma once

#include <stdexcept>
#include <string>

namespace approxwidths {

/// Violated precondition on caller-supplied data (bad parameter, incompatible
/// spaces, a profile that never reaches a required threshold, ...).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a usable answer.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}
inline void ensure(bool condition, const std::string& message) {
  if (!condition) throw SolverError(message);
}
}  // namespace detail

}  // namespace approxwidths
