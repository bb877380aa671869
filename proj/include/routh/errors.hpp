#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace routh {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  NotPositiveDefinite,
  ChartBoundary,
  SingularReducedMass,
  StepFailure,
  MaxStepsExceeded,
  MomentumMismatch,
  NonPositiveFactor,
  NoConvergence,
  GridMismatch,
  SpanTooShort,
  OffSurface,
  TangencyViolation,
  InvalidParams,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code: 2 config, 3 chart/domain, 4 consistency, 5 convergence.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace routh
