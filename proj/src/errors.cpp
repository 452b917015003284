#include "betalab/errors.hpp"

namespace betalab {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::InvalidBeta: return "InvalidBeta";
    case ErrorKind::UndecidableAtPrecision: return "UndecidableAtPrecision";
    case ErrorKind::NotSelfAdmissible: return "NotSelfAdmissible";
    case ErrorKind::DegenerateRoot: return "DegenerateRoot";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::NotAdmissibleInput: return "NotAdmissibleInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InsufficientSample: return "InsufficientSample";
    case ErrorKind::DepthTooShallow: return "DepthTooShallow";
    case ErrorKind::GrowthViolation: return "GrowthViolation";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::OscillationNotObserved: return "OscillationNotObserved";
    case ErrorKind::NoSingleEditFound: return "NoSingleEditFound";
    case ErrorKind::NotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace betalab
