#pragma once

#include <stdexcept>
#include <string>

namespace aomdd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A caller broke an operation's precondition (e.g. a partial assignment
/// where a full one is required).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Pseudo trees, scopes or diagrams that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace aomdd
