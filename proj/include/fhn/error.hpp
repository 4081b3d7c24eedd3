#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fhn {

enum class ErrorKind {
  DomainError,
  SaddleNodeBoundary,
  NoSaddle,
  NewtonDiverged,
  DivisionByZero,
  OutOfValidity,
  NoIntersection,
  NoPassage,
  NoFirstSpike,
  OutOfRange,
  IncompleteGrid,
  StepSizeUnderflow,
  MaxStepsExceeded,
  NonFiniteState,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SaddleNodeBoundary: return "SaddleNodeBoundary";
    case ErrorKind::NoSaddle: return "NoSaddle";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::OutOfValidity: return "OutOfValidity";
    case ErrorKind::NoIntersection: return "NoIntersection";
    case ErrorKind::NoPassage: return "NoPassage";
    case ErrorKind::NoFirstSpike: return "NoFirstSpike";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::IncompleteGrid: return "IncompleteGrid";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the toolkit carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace fhn
