#include "lvfront/errors.hpp"

namespace lvfront {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateRegime: return "DegenerateRegime";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::SubminimalSpeed: return "SubminimalSpeed";
    case ErrorKind::SignSplitViolation: return "SignSplitViolation";
    case ErrorKind::HomotopyBreak: return "HomotopyBreak";
    case ErrorKind::AmbiguousMultiplicity: return "AmbiguousMultiplicity";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MonotonicityLost: return "MonotonicityLost";
    case ErrorKind::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorKind::PoorFit: return "PoorFit";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::InitialDataOutOfBox: return "InitialDataOutOfBox";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::EnvelopeViolated: return "EnvelopeViolated";
    case ErrorKind::SelectorAllZero: return "SelectorAllZero";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::InequalityViolated: return "InequalityViolated";
    case ErrorKind::StepRejectedFloor: return "StepRejectedFloor";
    case ErrorKind::SandwichViolated: return "SandwichViolated";
    case ErrorKind::NoConvergenceTrend: return "NoConvergenceTrend";
    case ErrorKind::PropertyFailed: return "PropertyFailed";
    case ErrorKind::UnboundedGrowth: return "UnboundedGrowth";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_certification_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BoundViolated:
    case ErrorKind::EnvelopeViolated:
    case ErrorKind::InequalityViolated:
    case ErrorKind::SandwichViolated:
    case ErrorKind::NoConvergenceTrend:
    case ErrorKind::PropertyFailed:
    case ErrorKind::UnboundedGrowth:
    case ErrorKind::AssumptionViolated:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace lvfront
