// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sar/error.hpp"
#include "sar/random.hpp"

namespace sar {

using Bytes = std::vector<std::uint8_t>;
using Key256 = std::array<std::uint8_t, 32>;
using Iv128 = std::array<std::uint8_t, 16>;
using Mac256 = std::array<std::uint8_t, 32>;

inline constexpr std::uint8_t kEnvelopeVersion = 1;
inline constexpr std::size_t kMaxSealedPayloadBytes = 1u << 20;
/// version(1) + key_id(4) + iv(16) + mac(32)
inline constexpr std::size_t kEnvelopeHeaderBytes = 1 + 4 + 16 + 32;

struct KeyRing {
  Key256 enc_key{};
  Key256 mac_key{};
  std::uint32_t key_id = 0;

  /// Throws InvalidArgument if the two keys are equal.
  void validate() const;

  /// Keys as 64 hex characters each.
  static KeyRing from_hex(std::string_view enc_hex, std::string_view mac_hex, std::uint32_t key_id);
  /// SAR_ENC_KEY, SAR_MAC_KEY (hex) and optional SAR_KEY_ID.
  static KeyRing from_env();
};

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// OpenSSL CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic stream for tests and reproducible simulations.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : rng_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  Rng rng_;
};

/// Wire form: version(1) | key_id(4, big-endian) | iv(16) | mac(32) | ciphertext.
/// The MAC is HMAC-SHA256 over version | iv | ciphertext.
struct SealedEnvelope {
  std::uint8_t version = kEnvelopeVersion;
  std::uint32_t key_id = 0;
  Iv128 iv{};
  Mac256 mac{};
  Bytes ciphertext;

  Bytes to_wire() const;
  /// Throws MalformedEnvelope on short input or ragged ciphertext.
  static SealedEnvelope from_wire(std::span<const std::uint8_t> wire);

  std::string to_base64() const;
  static SealedEnvelope from_base64(std::string_view text);
};

/// Canonical JSON (sorted keys, no whitespace) of the payload, PKCS#7
/// padded, AES-256-CBC encrypted under a fresh IV, then MACed.
/// Throws PayloadTooLarge above 1 MiB of plaintext.
SealedEnvelope seal(const nlohmann::json& payload, const KeyRing& keys, RandomSource& rng);

/// Verifies the MAC in constant time before decrypting. Throws
/// WrongVersion, MacMismatch, BadPadding or MalformedEnvelope.
nlohmann::json open(const SealedEnvelope& env, const KeyRing& keys);

/// Base64 token for one stored text field.
std::string encrypt_field(std::string_view plaintext, const KeyRing& keys, RandomSource& rng);
std::string decrypt_field(std::string_view token, const KeyRing& keys);

/// Message shown to peers for envelope failures; tampering and corruption
/// are indistinguishable from outside.
std::string_view external_message(ErrorCode code);

// Primitives, exposed for known-answer tests.
Bytes aes256_cbc_encrypt_blocks(const Key256& key, const Iv128& iv, std::span<const std::uint8_t> blocks);
Bytes aes256_cbc_decrypt_blocks(const Key256& key, const Iv128& iv, std::span<const std::uint8_t> blocks);
Mac256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);
Bytes pkcs7_pad(std::span<const std::uint8_t> data, std::size_t block = 16);
/// Throws BadPadding.
Bytes pkcs7_unpad(std::span<const std::uint8_t> data, std::size_t block = 16);

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws MalformedEnvelope on invalid input.
Bytes base64_decode(std::string_view text);

Bytes hex_decode(std::string_view hex);
std::string hex_encode(std::span<const std::uint8_t> data);

}  // namespace sar
