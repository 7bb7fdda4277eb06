#pragma once

#include <stdexcept>
#include <string>

namespace allin1 {

// Base of every error raised by the library. The CLI maps the concrete type
// onto an exit code: usage errors exit 1, data/format errors 2, numeric 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input data in datasets, embedding files or bundles.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, const std::string& source = "")
      : DataError((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + what),
        detail_(what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

class LabelError : public DataError {
 public:
  explicit LabelError(const std::string& value)
      : DataError("unknown label '" + value + "'"), value_(value) {}
  const std::string& value() const noexcept { return value_; }

 private:
  std::string value_;
};

class InsufficientDictionaryError : public DataError {
 public:
  using DataError::DataError;
};

class ChecksumError : public DataError {
 public:
  using DataError::DataError;
};

class VersionError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace allin1
