#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dstp {

enum class ErrorKind {
  MalformedSyntax,
  InvariantViolation,
  UnknownVariant,
  InconsistentRotation,
  EulerViolation,
  AllZeroCosts,
  DisconnectedContractionSet,
  EmbeddingInvalid,
  UnreachableWeight,
  UnreachableTerminal,
  GammaNonpositive,
  SubtreeNotRooted,
  CostExceedsGamma,
  NotAnRtree,
  InfeasibleGroup,
  NoReachableGroup,
  Infeasible,
  EllOutOfRange,
  NoTerminals,
  UnreachableSupport,
  TooManyTerminals,
  KTooSmall,
  InfeasibleX,
  SpecInvalid,
  SeparatorFailure,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dstp
