#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace evi {

// Failure category; the CLI maps these onto exit codes.
enum class ErrorCategory { Validation, Numerical, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Expression syntax error at a character offset in the source text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorCategory::Validation,
              "at position " + std::to_string(position) + ": " + message),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Model document or argument violates a schema or invariant. `path` names
// the offending field, e.g. "variables[2].dist.sd".
class ModelError : public Error {
 public:
  ModelError(std::string path, const std::string& message)
      : Error(ErrorCategory::Validation, path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class EvalErrorKind { MissingVariable, DivisionByZero, LogDomain, NonFinite };

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& message)
      : Error(ErrorCategory::Validation, message), kind_(kind) {}
  EvalErrorKind kind() const noexcept { return kind_; }

 private:
  EvalErrorKind kind_;
};

// Least-squares design matrix is singular or too ill-conditioned to trust.
class DegenerateFitError : public Error {
 public:
  DegenerateFitError(std::vector<std::string> columns, const std::string& message)
      : Error(ErrorCategory::Numerical, message), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCategory::Io, message) {}
};

}  // namespace evi
