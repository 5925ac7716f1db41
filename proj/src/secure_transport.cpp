// SPDX-License-Identifier: Apache-2.0
#include "sar/secure_transport.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <cstdlib>
#include <memory>

namespace sar {

namespace {

struct CipherCtxFree {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;

Bytes aes_blocks(const Key256& key, const Iv128& iv, std::span<const std::uint8_t> in, bool encrypt) {
  if (in.size() % 16 != 0) throw Error(ErrorCode::InvalidArgument, "AES-CBC input must be whole blocks");
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  if (EVP_CipherInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(), iv.data(), encrypt ? 1 : 0) != 1 ||
      EVP_CIPHER_CTX_set_padding(ctx.get(), 0) != 1) {
    throw std::runtime_error("AES-256-CBC initialisation failed");
  }
  Bytes out(in.size() + 16);
  int n1 = 0;
  int n2 = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &n1, in.data(), static_cast<int>(in.size())) != 1 ||
      EVP_CipherFinal_ex(ctx.get(), out.data() + n1, &n2) != 1) {
    throw std::runtime_error("AES-256-CBC operation failed");
  }
  out.resize(static_cast<std::size_t>(n1 + n2));
  return out;
}

Mac256 envelope_mac(const KeyRing& keys, std::uint8_t version, const Iv128& iv, std::span<const std::uint8_t> ct) {
  Bytes data;
  data.reserve(1 + iv.size() + ct.size());
  data.push_back(version);
  data.insert(data.end(), iv.begin(), iv.end());
  data.insert(data.end(), ct.begin(), ct.end());
  return hmac_sha256(keys.mac_key, data);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

void KeyRing::validate() const {
  if (CRYPTO_memcmp(enc_key.data(), mac_key.data(), enc_key.size()) == 0) {
    throw Error(ErrorCode::InvalidArgument, "encryption and MAC keys must differ");
  }
}

KeyRing KeyRing::from_hex(std::string_view enc_hex, std::string_view mac_hex, std::uint32_t key_id) {
  const auto enc = hex_decode(enc_hex);
  const auto mac = hex_decode(mac_hex);
  if (enc.size() != 32 || mac.size() != 32) {
    throw Error(ErrorCode::InvalidArgument, "keys must be 32 bytes (64 hex characters)");
  }
  KeyRing k;
  std::copy(enc.begin(), enc.end(), k.enc_key.begin());
  std::copy(mac.begin(), mac.end(), k.mac_key.begin());
  k.key_id = key_id;
  k.validate();
  return k;
}

KeyRing KeyRing::from_env() {
  const char* enc = std::getenv("SAR_ENC_KEY");
  const char* mac = std::getenv("SAR_MAC_KEY");
  const char* id = std::getenv("SAR_KEY_ID");
  if (enc == nullptr || mac == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "SAR_ENC_KEY and SAR_MAC_KEY must be set");
  }
  return from_hex(enc, mac, id != nullptr ? static_cast<std::uint32_t>(std::strtoul(id, nullptr, 10)) : 1);
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("system random generator failed");
  }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t v = rng_.next();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(v & 0xff);
      v >>= 8;
    }
  }
}

Bytes SealedEnvelope::to_wire() const {
  Bytes out;
  out.reserve(kEnvelopeHeaderBytes + ciphertext.size());
  out.push_back(version);
  out.push_back(static_cast<std::uint8_t>(key_id >> 24));
  out.push_back(static_cast<std::uint8_t>(key_id >> 16));
  out.push_back(static_cast<std::uint8_t>(key_id >> 8));
  out.push_back(static_cast<std::uint8_t>(key_id));
  out.insert(out.end(), iv.begin(), iv.end());
  out.insert(out.end(), mac.begin(), mac.end());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  return out;
}

SealedEnvelope SealedEnvelope::from_wire(std::span<const std::uint8_t> wire) {
  if (wire.size() < kEnvelopeHeaderBytes + 16) throw Error(ErrorCode::MalformedEnvelope, "envelope too short");
  SealedEnvelope env;
  env.version = wire[0];
  env.key_id = (std::uint32_t{wire[1]} << 24) | (std::uint32_t{wire[2]} << 16) | (std::uint32_t{wire[3]} << 8) |
               std::uint32_t{wire[4]};
  std::copy_n(wire.begin() + 5, 16, env.iv.begin());
  std::copy_n(wire.begin() + 21, 32, env.mac.begin());
  env.ciphertext.assign(wire.begin() + static_cast<std::ptrdiff_t>(kEnvelopeHeaderBytes), wire.end());
  if (env.ciphertext.size() % 16 != 0) {
    throw Error(ErrorCode::MalformedEnvelope, "ciphertext is not a whole number of blocks");
  }
  return env;
}

std::string SealedEnvelope::to_base64() const { return base64_encode(to_wire()); }

SealedEnvelope SealedEnvelope::from_base64(std::string_view text) { return from_wire(base64_decode(text)); }

SealedEnvelope seal(const nlohmann::json& payload, const KeyRing& keys, RandomSource& rng) {
  const std::string canonical = payload.dump();
  if (canonical.size() > kMaxSealedPayloadBytes) {
    throw Error(ErrorCode::PayloadTooLarge, std::to_string(canonical.size()) + " bytes exceeds the 1 MiB limit");
  }
  SealedEnvelope env;
  env.key_id = keys.key_id;
  rng.fill(env.iv);
  const auto padded = pkcs7_pad({reinterpret_cast<const std::uint8_t*>(canonical.data()), canonical.size()});
  env.ciphertext = aes256_cbc_encrypt_blocks(keys.enc_key, env.iv, padded);
  env.mac = envelope_mac(keys, env.version, env.iv, env.ciphertext);
  return env;
}

nlohmann::json open(const SealedEnvelope& env, const KeyRing& keys) {
  if (env.version != kEnvelopeVersion) throw Error(ErrorCode::WrongVersion, "unsupported envelope version");
  if (env.ciphertext.empty() || env.ciphertext.size() % 16 != 0) {
    throw Error(ErrorCode::MalformedEnvelope, "ciphertext is not a whole number of blocks");
  }
  const auto expected = envelope_mac(keys, env.version, env.iv, env.ciphertext);
  const bool mac_ok = CRYPTO_memcmp(expected.data(), env.mac.data(), expected.size()) == 0;
  if (!mac_ok || env.key_id != keys.key_id) throw Error(ErrorCode::MacMismatch, "envelope authentication failed");
  const auto padded = aes256_cbc_decrypt_blocks(keys.enc_key, env.iv, env.ciphertext);
  const auto plain = pkcs7_unpad(padded);
  auto parsed = nlohmann::json::parse(plain.begin(), plain.end(), nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::MalformedEnvelope, "payload is not JSON");
  return parsed;
}

std::string encrypt_field(std::string_view plaintext, const KeyRing& keys, RandomSource& rng) {
  return seal(nlohmann::json(std::string(plaintext)), keys, rng).to_base64();
}

std::string decrypt_field(std::string_view token, const KeyRing& keys) {
  const auto value = open(SealedEnvelope::from_base64(token), keys);
  if (!value.is_string()) throw Error(ErrorCode::MalformedEnvelope, "field token does not hold text");
  return value.get<std::string>();
}

std::string_view external_message(ErrorCode code) {
  switch (code) {
    case ErrorCode::MacMismatch:
    case ErrorCode::BadPadding:
    case ErrorCode::MalformedEnvelope:
      return "envelope rejected";
    case ErrorCode::WrongVersion:
      return "unsupported envelope version";
    case ErrorCode::PayloadTooLarge:
      return "payload too large";
    default:
      return "request failed";
  }
}

Bytes aes256_cbc_encrypt_blocks(const Key256& key, const Iv128& iv, std::span<const std::uint8_t> blocks) {
  return aes_blocks(key, iv, blocks, true);
}

Bytes aes256_cbc_decrypt_blocks(const Key256& key, const Iv128& iv, std::span<const std::uint8_t> blocks) {
  return aes_blocks(key, iv, blocks, false);
}

Mac256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
  Mac256 out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len) ==
          nullptr ||
      len != out.size()) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  return out;
}

Bytes pkcs7_pad(std::span<const std::uint8_t> data, std::size_t block) {
  const std::size_t pad = block - data.size() % block;
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), pad, static_cast<std::uint8_t>(pad));
  return out;
}

Bytes pkcs7_unpad(std::span<const std::uint8_t> data, std::size_t block) {
  if (data.empty() || data.size() % block != 0) throw Error(ErrorCode::BadPadding, "invalid padded length");
  const std::size_t pad = data.back();
  if (pad == 0 || pad > block) throw Error(ErrorCode::BadPadding, "invalid padding byte");
  for (std::size_t i = data.size() - pad; i < data.size(); ++i) {
    if (data[i] != pad) throw Error(ErrorCode::BadPadding, "inconsistent padding");
  }
  return Bytes(data.begin(), data.end() - static_cast<std::ptrdiff_t>(pad));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::MalformedEnvelope, "base64 length is not a multiple of 4");
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
                    c == '/' || (c == '=' && i + 2 >= text.size());
    if (!ok) throw Error(ErrorCode::MalformedEnvelope, "invalid base64 character");
  }
  if (text.size() >= 2 && text[text.size() - 2] == '=' && text.back() != '=') {
    throw Error(ErrorCode::MalformedEnvelope, "misplaced base64 padding");
  }
  Bytes out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::MalformedEnvelope, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() > 1 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

Bytes hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::InvalidArgument, "hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::InvalidArgument, "invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string hex_encode(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

}  // namespace sar
