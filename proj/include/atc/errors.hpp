#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace atc {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class MissingLabels : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InsufficientCalibration : public Error {
 public:
  using Error::Error;
};

class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Errors that can point at a line of an input file.
class RowError : public Error {
 public:
  RowError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
      : Error(row ? what + " (line " + std::to_string(*row) + ")" : what), row_(row) {}

  std::optional<std::size_t> row() const { return row_; }

 private:
  std::optional<std::size_t> row_;
};

class NotOnSimplex : public RowError {
 public:
  using RowError::RowError;
};

class ParseError : public RowError {
 public:
  using RowError::RowError;
};

}  // namespace atc
