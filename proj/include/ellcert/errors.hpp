#pragma once

#include <stdexcept>
#include <string>

namespace ellcert {

// Bad arguments or malformed domain values: dimension mismatches, asymmetric
// or indefinite shape matrices, out-of-range instruction indices.
class InvalidInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// An iterative kernel failed to converge within its iteration cap.
class NumericalFailureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The loop map admits no positive definite Lyapunov solution, so no bounded
// invariant can be constructed for it.
class UnstableSystemError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed program or certificate document. `where` names the offending
// field (or carries the parser's line/byte position for syntax errors).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(where) {}

  const std::string& where() const { return where_; }

private:
  std::string where_;
};

}  // namespace ellcert
