#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qmut {

enum class ErrorCode {
  DuplicateVertex,
  UnknownVertex,
  InvalidVertexId,
  SelfLoop,
  TwoCycleInInput,
  NonpositiveWeight,
  FrozenVertexMutation,
  EmptySubset,
  SameVertex,
  EmptyQuiver,
  MutableAdjacency,
  NonCommutingFamily,
  InvalidInstance,
  InvalidSubset,
  OutOfValidityWindow,
  WrongMutableCount,
  Truncated,
  ValidityWindowViolated,
  Inconclusive,
  DegenerateVertex,
  InsufficientSteps,
  InvalidWeights,
  InvalidLimits,
  ParseError,
  LimitExceeded,
  PortInUse,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::InvalidVertexId: return "InvalidVertexId";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::TwoCycleInInput: return "TwoCycleInInput";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::FrozenVertexMutation: return "FrozenVertexMutation";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::SameVertex: return "SameVertex";
    case ErrorCode::EmptyQuiver: return "EmptyQuiver";
    case ErrorCode::MutableAdjacency: return "MutableAdjacency";
    case ErrorCode::NonCommutingFamily: return "NonCommutingFamily";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InvalidSubset: return "InvalidSubset";
    case ErrorCode::OutOfValidityWindow: return "OutOfValidityWindow";
    case ErrorCode::WrongMutableCount: return "WrongMutableCount";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::ValidityWindowViolated: return "ValidityWindowViolated";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::DegenerateVertex: return "DegenerateVertex";
    case ErrorCode::InsufficientSteps: return "InsufficientSteps";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidLimits: return "InvalidLimits";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::PortInUse: return "PortInUse";
  }
  return "Unknown";
}

/// Domain error raised by every qmut operation. `step` is set when the error
/// occurred while replaying a mutation sequence.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code),
        detail_(message),
        step_(step) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> step_;
};

}  // namespace qmut
