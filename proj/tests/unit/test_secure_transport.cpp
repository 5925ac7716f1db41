// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <set>
#include <string>

#include "sar/secure_transport.hpp"
#include "support.hpp"

using namespace sar;
using nlohmann::json;
using sar::test::error_of;

namespace {

Bytes as_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

KeyRing test_keys(std::uint32_t id = 7) {
  return KeyRing::from_hex("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4",
                           "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", id);
}

}  // namespace

TEST_CASE("AES-256-CBC matches the NIST SP 800-38A vectors") {
  Key256 key{};
  Iv128 iv{};
  const auto k = hex_decode("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4");
  const auto v = hex_decode("000102030405060708090a0b0c0d0e0f");
  std::copy(k.begin(), k.end(), key.begin());
  std::copy(v.begin(), v.end(), iv.begin());
  const auto pt = hex_decode(
      "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
      "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
  const std::string ct =
      "f58c4c04d6e5f1ba779eabfb5f7bfbd69cfc4e967edb808d679f777bc6702c7d"
      "39f23369a9d9bacfa530e26304231461b2eb05e2c39be9fcda6c19078c6a9d1b";
  CHECK(hex_encode(aes256_cbc_encrypt_blocks(key, iv, pt)) == ct);
  CHECK(aes256_cbc_decrypt_blocks(key, iv, hex_decode(ct)) == pt);
  CHECK(error_of([&] { (void)aes256_cbc_encrypt_blocks(key, iv, Bytes(15)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("HMAC-SHA256 matches RFC 4231") {
  const Bytes key1(20, 0x0b);
  const auto m1 = hmac_sha256(key1, as_bytes("Hi There"));
  CHECK(hex_encode(m1) == "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  const auto m2 = hmac_sha256(as_bytes("Jefe"), as_bytes("what do ya want for nothing?"));
  CHECK(hex_encode(m2) == "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("base64 matches RFC 4648 and rejects junk") {
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},          {"f", "Zg=="},         {"fo", "Zm8="},          {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
  };
  for (const auto& [plain, encoded] : vectors) {
    CHECK(base64_encode(as_bytes(plain)) == encoded);
    CHECK(base64_decode(encoded) == as_bytes(plain));
  }
  CHECK(error_of([] { (void)base64_decode("Zm9"); }) == ErrorCode::MalformedEnvelope);
  CHECK(error_of([] { (void)base64_decode("Zm9v!A=="); }) == ErrorCode::MalformedEnvelope);
  CHECK(error_of([] { (void)base64_decode("Zm=v"); }) == ErrorCode::MalformedEnvelope);
}

TEST_CASE("PKCS#7 padding") {
  for (std::size_t n = 0; n < 40; ++n) {
    const Bytes data(n, 0xAB);
    const auto padded = pkcs7_pad(data);
    CHECK(padded.size() % 16 == 0);
    CHECK(padded.size() > n);
    CHECK(padded.back() == padded.size() - n);
    CHECK(pkcs7_unpad(padded) == data);
  }
  Bytes bad(16, 0x00);
  CHECK(error_of([&] { (void)pkcs7_unpad(bad); }) == ErrorCode::BadPadding);
  bad.back() = 17;
  CHECK(error_of([&] { (void)pkcs7_unpad(bad); }) == ErrorCode::BadPadding);
  bad.back() = 2;
  bad[14] = 3;
  CHECK(error_of([&] { (void)pkcs7_unpad(bad); }) == ErrorCode::BadPadding);
}

TEST_CASE("key ring validation and parsing") {
  CHECK_NOTHROW(test_keys().validate());
  CHECK(error_of([] {
          (void)KeyRing::from_hex("00", "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", 1);
        }) == ErrorCode::InvalidArgument);
  const std::string same = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";
  CHECK(error_of([&] { (void)KeyRing::from_hex(same, same, 1); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { (void)hex_decode("abc"); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { (void)hex_decode("zz"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("seal and open round trip") {
  const auto keys = test_keys();
  SeededRandom rng(1);
  Rng gen(99);
  for (int i = 0; i < 1000; ++i) {
    json payload = {{"i", i}, {"name", std::string(gen.below(200), 'x')}, {"v", gen.uniform01()}};
    const auto env = seal(payload, keys, rng);
    CHECK(env.key_id == keys.key_id);
    CHECK(env.ciphertext.size() % 16 == 0);
    CHECK(open(env, keys) == payload);
    const auto via_text = SealedEnvelope::from_base64(env.to_base64());
    CHECK(open(via_text, keys) == payload);
  }
}

TEST_CASE("every single-bit flip of the wire form is rejected") {
  const auto keys = test_keys();
  SeededRandom rng(2);
  std::size_t flips = 0;
  for (int i = 0; i < 100; ++i) {
    const auto env = seal(json{{"mission", i}, {"users", {"a1b2", "c3d4"}}}, keys, rng);
    const auto wire = env.to_wire();
    for (std::size_t byte = 0; byte < wire.size(); ++byte) {
      for (int bit = 0; bit < 8; ++bit) {
        auto tampered = wire;
        tampered[byte] ^= static_cast<std::uint8_t>(1u << bit);
        const auto code = error_of([&] { (void)open(SealedEnvelope::from_wire(tampered), keys); });
        REQUIRE(code.has_value());
        if (byte == 0) {
          CHECK(*code == ErrorCode::WrongVersion);
        } else {
          CHECK(*code == ErrorCode::MacMismatch);
        }
        ++flips;
      }
    }
  }
  CHECK(flips > 100 * 8 * kEnvelopeHeaderBytes);
}

TEST_CASE("wrong keys and malformed wire data") {
  const auto keys = test_keys();
  SeededRandom rng(3);
  const auto env = seal(json{{"x", 1}}, keys, rng);
  CHECK(error_of([&] { (void)open(env, test_keys(8)); }) == ErrorCode::MacMismatch);
  auto other = keys;
  other.mac_key[0] ^= 1;
  CHECK(error_of([&] { (void)open(env, other); }) == ErrorCode::MacMismatch);
  const auto wire = env.to_wire();
  CHECK(error_of([&] { (void)SealedEnvelope::from_wire({wire.data(), kEnvelopeHeaderBytes}); }) ==
        ErrorCode::MalformedEnvelope);
  CHECK(error_of([&] { (void)SealedEnvelope::from_wire({wire.data(), wire.size() - 1}); }) ==
        ErrorCode::MalformedEnvelope);
  CHECK(error_of([] { (void)SealedEnvelope::from_base64("not base64"); }) == ErrorCode::MalformedEnvelope);
  CHECK(external_message(ErrorCode::MacMismatch) == external_message(ErrorCode::BadPadding));
  CHECK(external_message(ErrorCode::MacMismatch) == external_message(ErrorCode::MalformedEnvelope));
}

TEST_CASE("authenticated garbage that is not JSON") {
  // Build a correctly authenticated envelope around non-JSON plaintext.
  const auto keys = test_keys();
  SealedEnvelope env;
  env.key_id = keys.key_id;
  env.iv.fill(0x11);
  env.ciphertext = aes256_cbc_encrypt_blocks(keys.enc_key, env.iv, pkcs7_pad(as_bytes("{not json")));
  Bytes signed_part;
  signed_part.reserve(1 + env.iv.size() + env.ciphertext.size());
  signed_part.push_back(env.version);
  signed_part.insert(signed_part.end(), env.iv.begin(), env.iv.end());
  signed_part.insert(signed_part.end(), env.ciphertext.begin(), env.ciphertext.end());
  env.mac = hmac_sha256(keys.mac_key, signed_part);
  CHECK(error_of([&] { (void)open(env, keys); }) == ErrorCode::MalformedEnvelope);

  // Same, with invalid padding under a valid MAC.
  env.ciphertext = aes256_cbc_encrypt_blocks(keys.enc_key, env.iv, Bytes(16, 0x00));
  signed_part.resize(1 + 16);
  signed_part.insert(signed_part.end(), env.ciphertext.begin(), env.ciphertext.end());
  env.mac = hmac_sha256(keys.mac_key, signed_part);
  CHECK(error_of([&] { (void)open(env, keys); }) == ErrorCode::BadPadding);
}

TEST_CASE("payload size limit") {
  const auto keys = test_keys();
  SeededRandom rng(4);
  CHECK_NOTHROW((void)seal(json(std::string(kMaxSealedPayloadBytes - 2, 'a')), keys, rng));
  CHECK(error_of([&] { (void)seal(json(std::string(kMaxSealedPayloadBytes - 1, 'a')), keys, rng); }) ==
        ErrorCode::PayloadTooLarge);
}

TEST_CASE("IVs never repeat across a million seals") {
  const auto keys = test_keys();
  SystemRandom rng;
  std::set<Iv128> seen;
  const json payload = {{"k", 1}};
  for (int i = 0; i < 1'000'000; ++i) {
    REQUIRE(seen.insert(seal(payload, keys, rng).iv).second);
  }
}

TEST_CASE("field tokens") {
  const auto keys = test_keys();
  SeededRandom rng(5);
  const auto a = encrypt_field("Maria", keys, rng);
  const auto b = encrypt_field("Maria", keys, rng);
  CHECK(a != b);
  CHECK(a.find("Maria") == std::string::npos);
  CHECK(decrypt_field(a, keys) == "Maria");
  CHECK(decrypt_field(b, keys) == "Maria");
  CHECK(decrypt_field(encrypt_field("", keys, rng), keys).empty());
  CHECK(decrypt_field(encrypt_field("Calle \xc3\x91u\xc3\xb1" "ez 3", keys, rng), keys) == "Calle \xc3\x91u\xc3\xb1" "ez 3");
  std::string tampered = a;
  tampered[10] = tampered[10] == 'A' ? 'B' : 'A';
  CHECK(error_of([&] { (void)decrypt_field(tampered, keys); }).has_value());
}

TEST_CASE("keys from the environment") {
  ::setenv("SAR_ENC_KEY", "603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4", 1);
  ::setenv("SAR_MAC_KEY", "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", 1);
  ::unsetenv("SAR_KEY_ID");
  const auto k = KeyRing::from_env();
  CHECK(k.key_id == 1);
  CHECK(k.enc_key == test_keys().enc_key);
  ::unsetenv("SAR_MAC_KEY");
  CHECK(error_of([] { (void)KeyRing::from_env(); }) == ErrorCode::InvalidArgument);
  ::unsetenv("SAR_ENC_KEY");
}
