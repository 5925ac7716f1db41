// SPDX-License-Identifier: Apache-2.0
#include "sar/error.hpp"

namespace sar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::UrlTooLong: return "UrlTooLong";
    case ErrorCode::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::InvalidUrl: return "InvalidUrl";
    case ErrorCode::MalformedFrame: return "MalformedFrame";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::WeatherUnavailable: return "WeatherUnavailable";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::InvalidPhase: return "InvalidPhase";
    case ErrorCode::MissionStillRunning: return "MissionStillRunning";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::MacMismatch: return "MacMismatch";
    case ErrorCode::BadPadding: return "BadPadding";
    case ErrorCode::WrongVersion: return "WrongVersion";
    case ErrorCode::MalformedEnvelope: return "MalformedEnvelope";
    case ErrorCode::DuplicateUser: return "DuplicateUser";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownMission: return "UnknownMission";
    case ErrorCode::CorruptStore: return "CorruptStore";
  }
  return "Unknown";
}

}  // namespace sar
