#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fsnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: shape mismatches, out-of-range arguments, malformed files.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed binary input. `offset()` is the byte position where decoding failed.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : ValidationError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Numerical failure at runtime (SVD trouble, non-finite loss, divergence).
/// The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsnet
