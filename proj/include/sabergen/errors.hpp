#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sabergen {

// Base for every error raised by the library. The CLI maps the subclasses
// onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: invalid config values, missing inputs, empty corpora.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable data: CSV schema problems, empty dumps, bad files.
class DataError : public Error {
 public:
  using Error::Error;
};

class SerializationError : public DataError {
 public:
  SerializationError(std::string field, const std::string& what)
      : DataError("serialize: field '" + field + "': " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : DataError("parse error at token " + std::to_string(offset) + ": " +
                  what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when training produces non-finite values.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace sabergen
