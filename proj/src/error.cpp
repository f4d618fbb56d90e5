#include "fogsim/error.hpp"

namespace fogsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::MissingPath: return "MissingPath";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::DiscontiguousPath: return "DiscontiguousPath";
    case ErrorCode::TimeTravel: return "TimeTravel";
    case ErrorCode::HandlerFault: return "HandlerFault";
    case ErrorCode::ForeignPlayer: return "ForeignPlayer";
    case ErrorCode::StaleDelta: return "StaleDelta";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::NoPeers: return "NoPeers";
    case ErrorCode::QueueOverflow: return "QueueOverflow";
    case ErrorCode::DuplicateRequestId: return "DuplicateRequestId";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::MismatchedScenarios: return "MismatchedScenarios";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace fogsim
