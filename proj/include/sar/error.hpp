// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sar {

enum class ErrorCode {
  InvalidArgument,
  InvalidPolygon,
  EmptyGrid,
  GridTooLarge,
  InvalidK,
  Unreachable,
  UrlTooLong,
  UnsupportedScheme,
  InvalidUrl,
  MalformedFrame,
  DomainError,
  WeatherUnavailable,
  UnknownUser,
  InvalidPhase,
  MissionStillRunning,
  PayloadTooLarge,
  MacMismatch,
  BadPadding,
  WrongVersion,
  MalformedEnvelope,
  DuplicateUser,
  ValidationError,
  UnknownMission,
  CorruptStore,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (server, CLI) can map it onto a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sar
