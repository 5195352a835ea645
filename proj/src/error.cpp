#include "hyphinf/error.hpp"

namespace hyphinf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "dimension mismatch";
    case ErrorCode::kContract: return "contract violation";
    case ErrorCode::kNumerical: return "numerical failure";
    case ErrorCode::kDichotomyFailure: return "dichotomy failure";
    case ErrorCode::kSubspaceDimensionMismatch: return "subspace dimension mismatch";
    case ErrorCode::kNotPositiveDefinite: return "not positive definite";
    case ErrorCode::kNoStabilizingSolution: return "no stabilizing solution";
    case ErrorCode::kNonsingularityViolated: return "nonsingularity violated";
    case ErrorCode::kSignConditionViolated: return "sign condition violated";
    case ErrorCode::kNotWellPosed: return "not well-posed";
    case ErrorCode::kClosedLoopIllPosed: return "closed loop ill-posed";
    case ErrorCode::kCorrectionIllPosed: return "feedthrough correction ill-posed";
    case ErrorCode::kPoleProximity: return "evaluation point too close to a pole";
    case ErrorCode::kUnstableSystem: return "system is not stable";
    case ErrorCode::kRange: return "argument out of range";
    case ErrorCode::kConditionFailed: return "solvability condition failed";
    case ErrorCode::kSigmaQBound: return "sigma_q norm bound";
    case ErrorCode::kInput: return "invalid input";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hyphinf
