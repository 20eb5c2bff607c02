#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nneten {

enum class ErrorKind {
  WrongMagic,
  DimensionMismatch,
  Truncated,
  LabelOutOfRange,
  MissingFile,
  NetworkError,
  ValidationFailed,
  InvalidParam,
  Divergence,
  ParseError,
  EmptySeries,
  IoError,
  ZeroDenominator,
  InvalidGrid,
  TooShort,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. `kind()` lets callers (the CLI in particular)
/// map failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nneten
