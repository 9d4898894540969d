#pragma once

#include <stdexcept>
#include <string>

namespace somdsa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON syntax, unknown fields, wrong types).
struct ParseError : Error {
  using Error::Error;
};

// Structurally well-formed input whose values break an instance invariant.
struct ValidationError : Error {
  using Error::Error;
};

// Mismatched dimensions between objects that must share a shape.
struct ShapeError : Error {
  using Error::Error;
};

// Bad configuration values (flags, ranges, degenerate setups).
struct ConfigError : Error {
  using Error::Error;
};

// A demand that cannot be met within the channel budget.
struct InfeasibleError : Error {
  using Error::Error;
};

// Search space exceeds the exact-solver enumeration guard.
struct GuardError : Error {
  using Error::Error;
};

// Reference to an entity that does not exist (or already exists).
struct ReferenceError : Error {
  using Error::Error;
};

}  // namespace somdsa
