#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace srk {

struct SourceLoc {
  std::size_t line = 0;  // 1-based; 0 means unknown
  std::size_t col = 0;

  bool known() const { return line != 0; }
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

// Base of every error the library raises. Carries an optional source
// position so front ends can print `file:line:col: message`.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string message, SourceLoc loc = {})
      : std::runtime_error(message), message_(std::move(message)), loc_(loc) {}

  const std::string& message() const { return message_; }
  SourceLoc loc() const { return loc_; }

  std::string diagnostic(const std::string& file) const {
    if (loc_.known()) return file + ":" + loc_.str() + ": " + message_;
    return file + ": " + message_;
  }

 private:
  std::string message_;
  SourceLoc loc_;
};

// Lexical, arity, unknown-form and unbound-alias errors.
class ParseError : public Error {
  using Error::Error;
};

// Literal arguments that cannot be expanded.
class DesugarError : public Error {
  using Error::Error;
};

class TypeError : public Error {
  using Error::Error;
};

// Resource-limit failures: array size cap, fixpoint non-convergence,
// solver budgets. The CLI maps these to exit code 2.
class ResourceError : public Error {
  using Error::Error;
};

class SizeLimitError : public ResourceError {
  using ResourceError::ResourceError;
};

class ConvergenceError : public ResourceError {
  using ResourceError::ResourceError;
};

// External solver failures and internal consistency violations in the
// SAT path (bad model, undecodable bitstring).
class SolverError : public Error {
  using Error::Error;
};

}  // namespace srk
