#pragma once

#include <stdexcept>
#include <string>

namespace pgpca {

/// Failure categories raised by the library. The CLI maps every one of these
/// to exit code 2 (data/model error).
enum class ErrorKind {
  InsufficientData,
  TooManyKnots,
  DegenerateKnots,
  DegenerateTangent,
  DegenerateFrame,
  NonFiniteInput,
  AllZeroLikelihood,
  InvalidDimension,
  IllegalPair,
  LengthMismatch,
  DimensionMismatch,
  InvalidArgument,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pgpca
