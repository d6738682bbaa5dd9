#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcslam {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  // properties / serialization
  DuplicateKindMismatch,
  NotFound,
  KindMismatch,
  ParseError,
  UnknownClass,
  DanglingReference,
  // configuration
  DuplicateClass,
  MissingRequiredSlot,
  CycleDetected,
  ParamKindMismatch,
  UnknownParam,
  // estimation
  SingularSystem,
  NoFixedGauge,
  DegenerateAlignment,
  // simulation / evaluation
  SpawnInWall,
  NoPairs,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcslam
