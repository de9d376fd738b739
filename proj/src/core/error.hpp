#pragma once

#include <stdexcept>
#include <string>

namespace spa {

/// Base for every error the core raises. The C API maps each subclass to a
/// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad keys, violated config invariants).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A lookup fell outside a tabulated domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Problems with on-disk data. `kind` separates the failure modes so callers
/// can react differently to e.g. a corrupted blob and a missing one.
class DataError : public Error {
 public:
  enum class Kind { Parse, Io, Version, Truncated, Checksum, MissingEntry, Mismatch };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace spa
