#include "routh/errors.hpp"

namespace routh {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::ChartBoundary: return "ChartBoundary";
    case ErrorKind::SingularReducedMass: return "SingularReducedMass";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::MomentumMismatch: return "MomentumMismatch";
    case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SpanTooShort: return "SpanTooShort";
    case ErrorKind::OffSurface: return "OffSurface";
    case ErrorKind::TangencyViolation: return "TangencyViolation";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParams:
      return 2;
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::ChartBoundary:
    case ErrorKind::OffSurface:
    case ErrorKind::TangencyViolation:
    case ErrorKind::NonPositiveFactor:
      return 3;
    case ErrorKind::MomentumMismatch:
    case ErrorKind::GridMismatch:
    case ErrorKind::SpanTooShort:
      return 4;
    case ErrorKind::SingularReducedMass:
    case ErrorKind::StepFailure:
    case ErrorKind::MaxStepsExceeded:
    case ErrorKind::NoConvergence:
      return 5;
  }
  return 1;
}

}  // namespace routh
