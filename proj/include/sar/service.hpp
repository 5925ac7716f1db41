// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sar/detection.hpp"
#include "sar/mission.hpp"
#include "sar/secure_transport.hpp"
#include "sar/store.hpp"

namespace sar {

struct UserRegistration {
  std::string name;
  std::string surname;
  std::string address;
  std::string blood_type;
};

struct RegisteredUser {
  std::string user_code;
  std::string short_url_path;
  std::string beacon_url;
};

struct PollResult {
  std::vector<MissionEvent> events;
  std::uint64_t revision = 0;  // cursor for the next poll
  MissionPhase phase = MissionPhase::Created;
};

struct ServiceOptions {
  /// Prefix of the URL each phone broadcasts; the short path is appended.
  /// Must leave room for the path inside an Eddystone-URL frame.
  std::string public_base_url = "https://sos.org/b/";
  std::size_t short_path_length = 8;
  std::size_t max_ticks_per_advance = 100'000;
};

/// Application logic behind the HTTP API. Thread-safe; every mutation goes
/// through the store's single writer.
class SarService {
 public:
  SarService(Store& store, KeyRing keys, std::shared_ptr<WeatherProvider> weather,
             std::shared_ptr<RandomSource> random, ServiceOptions options = {});

  /// Throws ValidationError or DuplicateUser.
  RegisteredUser register_user(const UserRegistration& reg);
  /// Decrypted profile. Throws UnknownUser.
  UserRegistration profile(const std::string& user_code) const;
  bool in_search(const std::string& user_code) const;
  /// Operator action ending the search for one person. Throws UnknownUser.
  void close_search(const std::string& user_code);
  std::string beacon_url(const std::string& short_url_path) const;

  /// HTML page for a beacon URL path, or nullopt for a 404.
  std::optional<std::string> passive_lookup(const std::string& short_url_path) const;

  /// Body is {"config": {...}, "world": [...]} in plaintext or sealed.
  /// Marks the searched users in_search. Returns the mission id.
  std::string create_mission(const nlohmann::json& payload);
  std::string create_mission_sealed(const std::string& envelope_base64);

  /// Weather gate, planning and launch. Returns the phase reached.
  MissionPhase start_mission(const std::string& id);
  /// Runs up to max_ticks simulation ticks (0 means until the mission ends).
  MissionPhase advance_mission(const std::string& id, std::size_t max_ticks = 0);

  PollResult poll(const std::string& id, std::uint64_t since) const;
  MissionResult results(const std::string& id) const;
  std::string kml(const std::string& id) const;
  MissionRecord mission(const std::string& id) const;
  std::vector<std::pair<std::string, MissionPhase>> missions() const;

  const KeyRing& keys() const noexcept { return keys_; }

 private:
  std::shared_ptr<const StoredMission> find_mission(const StoreSnapshot& s, const std::string& id) const;
  std::string new_token(std::size_t bytes);
  std::string new_short_path();
  std::string identity_digest(const UserRegistration& reg) const;

  Store& store_;
  KeyRing keys_;
  std::shared_ptr<WeatherProvider> weather_;
  std::shared_ptr<RandomSource> random_;
  ServiceOptions options_;
  DetectionModel model_;
  mutable std::mutex random_mutex_;
};

/// HTML body of the passive-method page.
std::string render_passive_page(const std::string& user_code);

}  // namespace sar
