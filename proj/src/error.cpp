#include "pgpca/error.hpp"

namespace pgpca {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::TooManyKnots: return "TooManyKnots";
    case ErrorKind::DegenerateKnots: return "DegenerateKnots";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::AllZeroLikelihood: return "AllZeroLikelihood";
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::IllegalPair: return "IllegalPair";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
  }
  return "Error";
}

}  // namespace pgpca
