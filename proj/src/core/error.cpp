#include "mcslam/core/error.hpp"

namespace mcslam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateKindMismatch: return "DuplicateKindMismatch";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::DuplicateClass: return "DuplicateClass";
    case ErrorCode::MissingRequiredSlot: return "MissingRequiredSlot";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::ParamKindMismatch: return "ParamKindMismatch";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoFixedGauge: return "NoFixedGauge";
    case ErrorCode::DegenerateAlignment: return "DegenerateAlignment";
    case ErrorCode::SpawnInWall: return "SpawnInWall";
    case ErrorCode::NoPairs: return "NoPairs";
  }
  return "Unknown";
}

}  // namespace mcslam
