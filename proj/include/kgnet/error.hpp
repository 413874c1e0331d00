#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgnet {

/// Base class of every error raised by the platform.
///
/// Errors are split into two families so that front-ends can tell a bad
/// request apart from a failing service: `UserError` (malformed query, bad
/// budget, unknown model, ...) and `BackendError` (endpoint down, corrupt
/// artifact, I/O failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UserError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

/// Lexical or grammatical error with a 1-based source position.
class ParseError : public UserError {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : UserError(message + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a semantic rule (incomplete user-defined
/// predicate, projection of an unknown variable, ...).
class SemanticError : public UserError {
 public:
  using UserError::UserError;
};

class NotFoundError : public UserError {
 public:
  using UserError::UserError;
};

class IoError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace kgnet
