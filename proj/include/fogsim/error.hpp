#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fogsim {

enum class ErrorCode {
  // topology
  DuplicateId,
  LevelViolation,
  MissingPath,
  Unreachable,
  DiscontiguousPath,
  // engine
  TimeTravel,
  HandlerFault,
  // protocol
  ForeignPlayer,
  StaleDelta,
  // placement
  InvalidModel,
  EmptyBatch,
  NoPeers,
  QueueOverflow,
  // metrics
  DuplicateRequestId,
  EmptyWindow,
  UnknownLink,
  MismatchedScenarios,
  ZeroDenominator,
  // scenario / cli
  ParseError,
  ValidationError,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fogsim
