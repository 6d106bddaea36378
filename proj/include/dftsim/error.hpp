#pragma once

#include <stdexcept>
#include <string>

namespace dftsim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Program document does not match the schema; `where` is a JSON-pointer-like path.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Stored tracker status or table index that cannot have been produced by a real run.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition (e.g. ticking an idle tracker).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dftsim
