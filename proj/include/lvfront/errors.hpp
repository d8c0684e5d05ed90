#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lvfront {

/// Failure categories shared by every module. The CLI maps these to exit codes.
enum class ErrorKind {
  InvalidArgument,
  DegenerateRegime,
  AssumptionViolated,
  SubminimalSpeed,
  SignSplitViolation,
  HomotopyBreak,
  AmbiguousMultiplicity,
  NotAnEigenvalue,
  NoConvergence,
  MonotonicityLost,
  WindowTooNarrow,
  PoorFit,
  BoundViolated,
  InitialDataOutOfBox,
  Blowup,
  EnvelopeViolated,
  SelectorAllZero,
  DomainExceeded,
  InequalityViolated,
  StepRejectedFloor,
  SandwichViolated,
  NoConvergenceTrend,
  PropertyFailed,
  UnboundedGrowth,
  MissingArtifact,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// True for kinds that certify a mathematical property failed, as opposed to
/// bad input or a numerical breakdown.
bool is_certification_failure(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace lvfront
