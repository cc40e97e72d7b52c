#include "wickfield/error.hpp"

namespace wickfield {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::ExponentOverflow: return "ExponentOverflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::DivergentTheory: return "DivergentTheory";
    case ErrorKind::FitFailure: return "FitFailure";
    case ErrorKind::InconclusivePackets: return "InconclusivePackets";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::QuadratureFailure:
    case ErrorKind::DivergentTheory:
    case ErrorKind::FitFailure:
    case ErrorKind::InconclusivePackets:
    case ErrorKind::SingularPoint:
    case ErrorKind::SingularConfiguration:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

}  // namespace wickfield
