// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "sar/mission.hpp"
#include "sar/secure_transport.hpp"

namespace sar {

/// Registered person. Sensitive fields only exist as encrypt_field tokens.
struct UserRecord {
  std::string user_code;
  std::string short_url_path;
  std::string name_token;
  std::string surname_token;
  std::string address_token;
  std::string blood_type_token;
  /// Keyed digest of name, surname and address used to reject duplicates
  /// without keeping the plaintext.
  std::string identity_digest;
  bool in_search = false;
  std::uint64_t updated_revision = 0;
};

struct StoredMission {
  MissionRecord record;
  std::vector<SimulatedBeacon> world;  // simulated ground truth
  std::uint64_t updated_revision = 0;
};

struct StoreSnapshot {
  std::uint64_t revision = 0;
  std::map<std::string, UserRecord> users;  // by user_code
  std::map<std::string, std::shared_ptr<const StoredMission>> missions;

  const UserRecord* user_by_path(const std::string& short_url_path) const;
};

nlohmann::json snapshot_to_json(const StoreSnapshot& s);
/// Checks structure, revision monotonicity and that every field token
/// opens under `keys`. Throws CorruptStore.
StoreSnapshot snapshot_from_json(const nlohmann::json& j, const KeyRing& keys);

/// Writes to a sibling temporary file and renames it over `path`.
void persist(const StoreSnapshot& s, const std::filesystem::path& path);
/// Throws CorruptStore on unreadable, truncated or inconsistent files.
StoreSnapshot load(const std::filesystem::path& path, const KeyRing& keys);

/// Copy-on-write store. Readers take an immutable snapshot; writers are
/// serialized, work on a private copy and publish it with a new revision.
/// If the writer throws, nothing is published or persisted.
class Store {
 public:
  /// In-memory when `path` is empty; otherwise loads the file if it exists.
  explicit Store(const KeyRing& keys, std::optional<std::filesystem::path> path = std::nullopt);

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  template <class F>
  auto commit(F&& f) {
    std::lock_guard lock(write_mutex_);
    auto next = std::make_shared<StoreSnapshot>(*snapshot());
    ++next->revision;
    using R = std::invoke_result_t<F&, StoreSnapshot&>;
    if constexpr (std::is_void_v<R>) {
      f(*next);
      publish(std::move(next));
    } else {
      R result = f(*next);
      publish(std::move(next));
      return result;
    }
  }

  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

 private:
  void publish(std::shared_ptr<StoreSnapshot> next);

  std::optional<std::filesystem::path> path_;
  std::mutex write_mutex_;
  mutable std::mutex read_mutex_;
  std::shared_ptr<const StoreSnapshot> current_;
};

}  // namespace sar
