#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace camra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shape violations: odd sides, mismatched grids, insufficient divisibility.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Bad parameters: non-positive steps, singular matrices, bad illuminants.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Malformed or truncated compressed data. Carries the byte offset at which
/// decoding failed.
class FormatError : public Error {
public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// File system failures: missing inputs, unwritable outputs.
class IoError : public Error {
public:
  using Error::Error;
};

/// Missing or invalid metadata sidecar.
class MetadataError : public Error {
public:
  using Error::Error;
};

}  // namespace camra
