// SPDX-License-Identifier: Apache-2.0
#include "sar/beacon.hpp"

#include <array>
#include <string>

#include "sar/error.hpp"

namespace sar {

namespace {

// Eddystone-URL scheme prefixes, indexed by code. Longest match wins, so the
// "www." variants are tried first.
constexpr std::array<std::string_view, 4> kSchemes = {"http://www.", "https://www.", "http://", "https://"};
constexpr std::array<std::uint8_t, 4> kSchemeTryOrder = {0x01, 0x00, 0x03, 0x02};

// Expansion codes 0x00..0x0D.
constexpr std::array<std::string_view, 14> kExpansions = {
    ".com/", ".org/", ".edu/", ".net/", ".info/", ".biz/", ".gov/",
    ".com",  ".org",  ".edu",  ".net",  ".info",  ".biz",  ".gov",
};

bool is_reserved_byte(std::uint8_t b) { return (b >= 0x0E && b <= 0x20) || b >= 0x7F; }

}  // namespace

std::vector<std::uint8_t> BeaconFrame::bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(3 + encoded_url.size());
  out.push_back(frame_type);
  out.push_back(static_cast<std::uint8_t>(tx_power_dbm));
  out.push_back(scheme_code);
  out.insert(out.end(), encoded_url.begin(), encoded_url.end());
  return out;
}

BeaconFrame encode_url(std::string_view url, int tx_power_dbm) {
  if (tx_power_dbm < -100 || tx_power_dbm > 20) {
    throw Error(ErrorCode::DomainError, "tx power " + std::to_string(tx_power_dbm) + " dBm outside [-100, 20]");
  }
  BeaconFrame frame;
  frame.tx_power_dbm = static_cast<std::int8_t>(tx_power_dbm);

  std::string_view rest;
  bool matched = false;
  for (auto code : kSchemeTryOrder) {
    if (url.starts_with(kSchemes[code])) {
      frame.scheme_code = code;
      rest = url.substr(kSchemes[code].size());
      matched = true;
      break;
    }
  }
  if (!matched) throw Error(ErrorCode::UnsupportedScheme, "only http and https URLs can be broadcast");
  if (rest.empty()) throw Error(ErrorCode::InvalidUrl, "URL has no host");

  std::size_t i = 0;
  while (i < rest.size()) {
    // Longest expansion at this position; ".com/" beats ".com".
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t code = 0; code < kExpansions.size(); ++code) {
      const auto& e = kExpansions[code];
      if (e.size() > best_len && rest.substr(i).starts_with(e)) {
        best = static_cast<int>(code);
        best_len = e.size();
      }
    }
    if (best >= 0) {
      frame.encoded_url.push_back(static_cast<std::uint8_t>(best));
      i += best_len;
      continue;
    }
    const auto c = static_cast<std::uint8_t>(rest[i]);
    if (c <= 0x20 || is_reserved_byte(c)) {
      throw Error(ErrorCode::InvalidUrl, "character 0x" + std::to_string(c) + " cannot be broadcast");
    }
    frame.encoded_url.push_back(c);
    ++i;
  }
  if (frame.encoded_url.size() > kMaxEncodedUrlBytes) {
    throw Error(ErrorCode::UrlTooLong, "encoded URL is " + std::to_string(frame.encoded_url.size()) +
                                           " bytes, limit is " + std::to_string(kMaxEncodedUrlBytes));
  }
  return frame;
}

DecodedUrl decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 3) throw Error(ErrorCode::MalformedFrame, "frame shorter than header");
  if (bytes[0] != kEddystoneUrlFrameType) {
    throw Error(ErrorCode::MalformedFrame, "frame type " + std::to_string(bytes[0]) + " is not Eddystone-URL");
  }
  const std::uint8_t scheme = bytes[2];
  if (scheme >= kSchemes.size()) throw Error(ErrorCode::MalformedFrame, "unknown scheme code");
  const auto body = bytes.subspan(3);
  if (body.empty()) throw Error(ErrorCode::MalformedFrame, "empty URL body");
  if (body.size() > kMaxEncodedUrlBytes) throw Error(ErrorCode::MalformedFrame, "URL body too long");

  DecodedUrl out;
  out.tx_power_dbm = static_cast<std::int8_t>(bytes[1]);
  out.url = std::string(kSchemes[scheme]);
  for (auto b : body) {
    if (b < kExpansions.size()) {
      out.url += kExpansions[b];
    } else if (is_reserved_byte(b)) {
      throw Error(ErrorCode::MalformedFrame, "reserved byte in URL body");
    } else {
      out.url += static_cast<char>(b);
    }
  }
  return out;
}

void validate(const SimulatedBeacon& b) {
  if (b.advertising_interval_ms < kMinAdvertisingIntervalMs || b.advertising_interval_ms > kMaxAdvertisingIntervalMs) {
    throw Error(ErrorCode::InvalidArgument,
                "advertising interval " + std::to_string(b.advertising_interval_ms) + " ms outside [20, 10240]");
  }
  if (!is_valid(b.position)) throw Error(ErrorCode::InvalidArgument, "beacon position out of range");
  (void)encode_url(b.url, b.tx_power_dbm);
}

std::vector<TimedFrame> advertise(const SimulatedBeacon& b, std::int64_t duration_ms) {
  std::vector<TimedFrame> frames;
  if (!b.battery_ok || duration_ms <= 0) return frames;
  validate(b);
  const auto frame = encode_url(b.url, b.tx_power_dbm);
  const std::int64_t interval = b.advertising_interval_ms;
  frames.reserve(static_cast<std::size_t>((duration_ms + interval - 1) / interval));
  for (std::int64_t t = 0; t < duration_ms; t += interval) frames.push_back({t, frame});
  return frames;
}

}  // namespace sar
