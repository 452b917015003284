#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace betalab {

enum class ErrorKind {
  Parse,
  InvalidBeta,
  UndecidableAtPrecision,
  NotSelfAdmissible,
  DegenerateRoot,
  NotIncreasing,
  AlphabetMismatch,
  NotAdmissibleInput,
  LengthMismatch,
  BudgetExceeded,
  InsufficientSample,
  DepthTooShallow,
  GrowthViolation,
  EmptyPool,
  OscillationNotObserved,
  NoSingleEditFound,
  NotFound,
};

std::string_view kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace betalab
