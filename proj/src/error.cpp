#include "nneten/error.hpp"

namespace nneten {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::WrongMagic: return "WrongMagic";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::NetworkError: return "NetworkError";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::TooShort: return "TooShort";
  }
  return "Unknown";
}

}  // namespace nneten
