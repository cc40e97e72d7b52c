#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wickfield {

enum class ErrorKind {
  InvalidSpectrum,
  SyntaxError,
  UnknownVariable,
  ExponentOverflow,
  DimensionMismatch,
  SingularPoint,
  SingularConfiguration,
  Unsupported,
  QuadratureFailure,
  PreconditionViolated,
  InvalidParameter,
  InvalidWindow,
  DivergentTheory,
  FitFailure,
  InconclusivePackets,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// True for failures of a numerical procedure (as opposed to bad input).
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

/// Quadrature did not reach its tolerance within budget.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double achieved_error)
      : Error(ErrorKind::QuadratureFailure, message), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Parse failure carrying the offending character offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(ErrorKind::SyntaxError, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace wickfield
