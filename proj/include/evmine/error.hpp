#pragma once

#include <stdexcept>
#include <string>

namespace evmine {

// Every failure in the library surfaces as an Error with a stable kind tag.
// The CLI maps kinds to exit codes and machine-readable stderr JSON.
enum class ErrorKind {
  FileNotFound,
  DecodeError,
  ImageTooSmall,
  BoxOutOfBounds,
  EmptyGrid,
  LengthMismatch,
  DimensionMismatch,
  NonPositiveSigma,
  SchemaError,
  GridMismatch,
  NonFiniteValue,
  TooManyClusters,
  ZeroVector,
  NegativeAlpha,
  EmptyEvidence,
  IoError,
  Timeout,
  HttpError,
  MalformedResponse,
  EmptyDirectory,
  RegionOutOfBounds,
  InvalidConfig,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace evmine
