#pragma once

#include <stdexcept>
#include <string>

namespace ftfl {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (bad token, wrong dimensions, trailing garbage).
// Carries the 1-based line number of the offending token.
struct ParseError : Error {
  ParseError(const std::string& msg, int line_no)
      : Error("parse error (line " + std::to_string(line_no) + "): " + msg),
        line(line_no) {}
  int line;
};

// Structurally valid input that cannot be satisfied, e.g. a client demanding
// more distinct facilities than exist.
struct InfeasibleError : Error {
  using Error::Error;
};

// Arguments outside the supported domain (sizes, modes, flag values).
struct InvalidInputError : Error {
  using Error::Error;
};

// The LP engine gave up: iteration limit or numerical breakdown.  Input may
// be fine; the solve still failed and must not be reported as a solution.
struct SolverError : Error {
  using Error::Error;
};

// An internal consistency check failed.  Indicates a bug in this library
// (or a caller violating a documented precondition), never bad user input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace ftfl
