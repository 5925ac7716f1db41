// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sar/geodesy.hpp"

namespace sar {

inline constexpr std::uint8_t kEddystoneUrlFrameType = 0x10;
inline constexpr std::size_t kMaxEncodedUrlBytes = 17;
/// type + tx power + scheme + body
inline constexpr std::size_t kMaxUrlFrameBytes = 3 + kMaxEncodedUrlBytes;

/// Eddystone-URL service data: [0x10][tx power][scheme][encoded url...].
struct BeaconFrame {
  std::uint8_t frame_type = kEddystoneUrlFrameType;
  std::int8_t tx_power_dbm = 0;  // calibrated power at 0 m
  std::uint8_t scheme_code = 0;
  std::vector<std::uint8_t> encoded_url;

  std::vector<std::uint8_t> bytes() const;
  friend bool operator==(const BeaconFrame&, const BeaconFrame&) = default;
};

struct DecodedUrl {
  std::string url;
  int tx_power_dbm = 0;
};

/// Compresses an http(s) URL with the Eddystone scheme and expansion
/// tables. Throws UnsupportedScheme, UrlTooLong, InvalidUrl, DomainError
/// (tx power outside [-100, 20]).
BeaconFrame encode_url(std::string_view url, int tx_power_dbm = -20);

/// Inverse of encode_url. Throws MalformedFrame.
DecodedUrl decode_frame(std::span<const std::uint8_t> bytes);

inline constexpr int kMinAdvertisingIntervalMs = 20;
inline constexpr int kMaxAdvertisingIntervalMs = 10'240;

/// A missing person's phone acting as a Physical Web beacon.
struct SimulatedBeacon {
  std::string user_code;
  GeoPoint position{};
  std::string url;
  int advertising_interval_ms = 1000;
  int tx_power_dbm = -20;
  bool battery_ok = true;
};

/// Throws if the url does not encode or the interval is outside [20, 10240] ms.
void validate(const SimulatedBeacon& b);

struct TimedFrame {
  std::int64_t t_ms = 0;
  BeaconFrame frame;
};

/// Frames emitted at 0, interval, 2*interval, ... strictly before
/// duration_ms. Empty when the phone battery is flat.
std::vector<TimedFrame> advertise(const SimulatedBeacon& b, std::int64_t duration_ms);

}  // namespace sar
