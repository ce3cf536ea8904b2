#include "dstp/error.hpp"

namespace dstp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedSyntax: return "malformed-syntax";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::UnknownVariant: return "unknown-variant";
    case ErrorKind::InconsistentRotation: return "inconsistent-rotation";
    case ErrorKind::EulerViolation: return "euler-violation";
    case ErrorKind::AllZeroCosts: return "all-zero-costs";
    case ErrorKind::DisconnectedContractionSet: return "disconnected-contraction-set";
    case ErrorKind::EmbeddingInvalid: return "embedding-invalid";
    case ErrorKind::UnreachableWeight: return "unreachable-weight";
    case ErrorKind::UnreachableTerminal: return "unreachable-terminal";
    case ErrorKind::GammaNonpositive: return "gamma-nonpositive";
    case ErrorKind::SubtreeNotRooted: return "subtree-not-rooted";
    case ErrorKind::CostExceedsGamma: return "cost-exceeds-gamma";
    case ErrorKind::NotAnRtree: return "not-an-rtree";
    case ErrorKind::InfeasibleGroup: return "infeasible-group";
    case ErrorKind::NoReachableGroup: return "no-reachable-group";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::EllOutOfRange: return "ell-out-of-range";
    case ErrorKind::NoTerminals: return "no-terminals";
    case ErrorKind::UnreachableSupport: return "unreachable-support";
    case ErrorKind::TooManyTerminals: return "too-many-terminals";
    case ErrorKind::KTooSmall: return "k-too-small";
    case ErrorKind::InfeasibleX: return "infeasible-x";
    case ErrorKind::SpecInvalid: return "spec-invalid";
    case ErrorKind::SeparatorFailure: return "separator-failure";
  }
  return "unknown";
}

}  // namespace dstp
