#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stixelforge {

enum class Errc {
  InvalidArgument,
  BehindCamera,
  DegenerateHull,
  InsufficientPoints,
  NoModelFound,
  GroundNotFound,
  DegenerateStixel,
  GridMismatch,
  NonFiniteInput,
  DimensionMismatch,
  ColumnMismatch,
  LengthMismatch,
  TruncatedFile,
  MissingKey,
  MalformedMatrix,
  ParseError,
  BadMagic,
  VersionUnsupported,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the Python layer) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace stixelforge
