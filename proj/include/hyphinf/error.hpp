#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyphinf {

enum class ErrorCode {
  kDimension,
  kContract,
  kNumerical,
  kDichotomyFailure,
  kSubspaceDimensionMismatch,
  kNotPositiveDefinite,
  kNoStabilizingSolution,
  kNonsingularityViolated,
  kSignConditionViolated,
  kNotWellPosed,
  kClosedLoopIllPosed,
  kCorrectionIllPosed,
  kPoleProximity,
  kUnstableSystem,
  kRange,
  kConditionFailed,
  kSigmaQBound,
  kInput,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace hyphinf
