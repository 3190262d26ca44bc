#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dspl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document does not match its file format. `location` is a JSON pointer
/// or a byte offset into the input.
class FormatError : public Error {
 public:
  FormatError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)),
        detail_(message) {}

  const std::string& location() const { return location_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string location_;
  std::string detail_;
};

/// A model violates one of its structural invariants.
class ModelError : public Error {
 public:
  ModelError(std::string offender, const std::string& message)
      : Error(message), offender_(std::move(offender)) {}

  const std::string& offender() const { return offender_; }

 private:
  std::string offender_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// A configuration is structurally inconsistent with its model.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class UnboundAttributeError : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

class DerivationError : public Error {
 public:
  using Error::Error;
};

class TraceError : public Error {
 public:
  explicit TraceError(const std::string& message, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + message : message), line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Any error raised while loading one input file, prefixed with its path.
class FileError : public Error {
 public:
  FileError(std::string file, const std::string& message)
      : Error(file + ": " + message), file_(std::move(file)) {}

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

}  // namespace dspl
