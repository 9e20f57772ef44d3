#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kurihara {

enum class ErrorKind {
  MismatchedGroup,
  MismatchedRing,
  NotAQuotient,
  NotASurjection,
  NotInvertible,
  BadPrime,
  NonInvertibleEll,
  InvalidCurve,
  EigensymbolNotFound,
  AmbiguousEigenspace,
  CalibrationFailure,
  NotCoprime,
  DenominatorDivisibleByP,
  Supersingular,
  HypothesisViolation,
  NotAUnit,
  NotSquarefree,
  PrimeNotKolyvagin,
  SearchExhausted,
  MissingRootNumber,
  FrickeNotScalar,
  IdentityFailure,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kurihara
