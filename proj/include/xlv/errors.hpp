#pragma once

#include <stdexcept>
#include <string>

namespace xlv {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trace document violates the schema. `path()` points at the offending node,
/// e.g. "roots[0].children[1].args_before[0].payload.position".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// Reconstruction errors.
class UnknownTypeError : public Error {
 public:
  using Error::Error;
};
class UnboundReferenceError : public Error {
 public:
  using Error::Error;
};
class PayloadError : public Error {
 public:
  using Error::Error;
};
class FieldAssignError : public Error {
 public:
  using Error::Error;
};

class DepthExceededError : public Error {
 public:
  using Error::Error;
};

class EmitError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class TranslatorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace xlv
