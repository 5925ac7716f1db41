// SPDX-License-Identifier: Apache-2.0
#include "sar/service.hpp"

#include <algorithm>
#include <cctype>

#include "sar/error.hpp"
#include "sar/kml.hpp"

namespace sar {

using nlohmann::json;

namespace {

constexpr std::string_view kPathAlphabet = "abcdefghijkmnpqrstuvwxyz23456789";

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_passive_page(const std::string& user_code) {
  const auto code = html_escape(user_code);
  return "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Person in search</title></head><body>\n"
         "<h1>This person is being searched for</h1>\n<ol>\n"
         "<li>Call 112</li>\n"
         "<li>Communicate position</li>\n"
         "<li>Code: <strong>" +
         code + "</strong></li>\n</ol>\n</body></html>\n";
}

SarService::SarService(Store& store, KeyRing keys, std::shared_ptr<WeatherProvider> weather,
                       std::shared_ptr<RandomSource> random, ServiceOptions options)
    : store_(store),
      keys_(keys),
      weather_(std::move(weather)),
      random_(std::move(random)),
      options_(std::move(options)) {
  keys_.validate();
  if (!weather_ || !random_) throw Error(ErrorCode::InvalidArgument, "weather provider and random source required");
  // Fail at startup if the broadcast URL cannot hold a short path.
  (void)encode_url(options_.public_base_url + std::string(options_.short_path_length, 'a'));
}

std::string SarService::new_token(std::size_t bytes) {
  Bytes raw(bytes);
  {
    std::lock_guard lock(random_mutex_);
    random_->fill(raw);
  }
  return hex_encode(raw);
}

std::string SarService::new_short_path() {
  Bytes raw(options_.short_path_length);
  {
    std::lock_guard lock(random_mutex_);
    random_->fill(raw);
  }
  std::string out;
  for (auto b : raw) out += kPathAlphabet[b % kPathAlphabet.size()];
  return out;
}

std::string SarService::identity_digest(const UserRegistration& reg) const {
  const std::string id = lowered(trimmed(reg.name)) + '\0' + lowered(trimmed(reg.surname)) + '\0' +
                         lowered(trimmed(reg.address));
  return hex_encode(hmac_sha256(keys_.mac_key, {reinterpret_cast<const std::uint8_t*>(id.data()), id.size()}));
}

RegisteredUser SarService::register_user(const UserRegistration& reg) {
  for (const auto& [field, value] : {std::pair{"name", &reg.name}, std::pair{"surname", &reg.surname},
                                     std::pair{"address", &reg.address}, std::pair{"blood_type", &reg.blood_type}}) {
    if (trimmed(*value).empty()) throw Error(ErrorCode::ValidationError, std::string(field) + " is required");
  }
  UserRecord u;
  u.identity_digest = identity_digest(reg);
  {
    std::lock_guard lock(random_mutex_);
    u.name_token = encrypt_field(trimmed(reg.name), keys_, *random_);
    u.surname_token = encrypt_field(trimmed(reg.surname), keys_, *random_);
    u.address_token = encrypt_field(trimmed(reg.address), keys_, *random_);
    u.blood_type_token = encrypt_field(trimmed(reg.blood_type), keys_, *random_);
  }
  return store_.commit([&](StoreSnapshot& s) {
    for (const auto& [code, other] : s.users) {
      if (other.identity_digest == u.identity_digest) {
        throw Error(ErrorCode::DuplicateUser, "a user with the same name, surname and address exists");
      }
    }
    do {
      u.user_code = new_token(8);  // 64 bits
    } while (s.users.count(u.user_code) != 0);
    do {
      u.short_url_path = new_short_path();
    } while (s.user_by_path(u.short_url_path) != nullptr);
    u.updated_revision = s.revision;
    s.users.emplace(u.user_code, u);
    return RegisteredUser{u.user_code, u.short_url_path, beacon_url(u.short_url_path)};
  });
}

std::string SarService::beacon_url(const std::string& short_url_path) const {
  return options_.public_base_url + short_url_path;
}

UserRegistration SarService::profile(const std::string& user_code) const {
  const auto snap = store_.snapshot();
  auto it = snap->users.find(user_code);
  if (it == snap->users.end()) throw Error(ErrorCode::UnknownUser, "no such user");
  const auto& u = it->second;
  return {decrypt_field(u.name_token, keys_), decrypt_field(u.surname_token, keys_),
          decrypt_field(u.address_token, keys_), decrypt_field(u.blood_type_token, keys_)};
}

bool SarService::in_search(const std::string& user_code) const {
  const auto snap = store_.snapshot();
  auto it = snap->users.find(user_code);
  if (it == snap->users.end()) throw Error(ErrorCode::UnknownUser, "no such user");
  return it->second.in_search;
}

void SarService::close_search(const std::string& user_code) {
  store_.commit([&](StoreSnapshot& s) {
    auto it = s.users.find(user_code);
    if (it == s.users.end()) throw Error(ErrorCode::UnknownUser, "no such user");
    it->second.in_search = false;
    it->second.updated_revision = s.revision;
  });
}

std::optional<std::string> SarService::passive_lookup(const std::string& short_url_path) const {
  const auto snap = store_.snapshot();
  const auto* u = snap->user_by_path(short_url_path);
  if (u == nullptr || !u->in_search) return std::nullopt;
  return render_passive_page(u->user_code);
}

std::string SarService::create_mission_sealed(const std::string& envelope_base64) {
  return create_mission(open(SealedEnvelope::from_base64(envelope_base64), keys_));
}

std::string SarService::create_mission(const json& payload) {
  if (!payload.is_object() || !payload.contains("config")) {
    throw Error(ErrorCode::ValidationError, "payload must be an object with a \"config\" member");
  }
  auto config = payload.at("config").get<MissionConfig>();
  validate(config);
  std::vector<SimulatedBeacon> world;
  if (payload.contains("world")) {
    if (!payload["world"].is_array()) throw Error(ErrorCode::ValidationError, "world must be an array");
    world = payload["world"].get<std::vector<SimulatedBeacon>>();
    for (const auto& b : world) {
      try {
        validate(b);
      } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string("world beacon: ") + e.what());
      }
    }
  }
  const auto id = "m-" + new_token(6);
  return store_.commit([&](StoreSnapshot& s) {
    for (const auto& code : config.searched_user_codes) {
      if (s.users.count(code) == 0) throw Error(ErrorCode::UnknownUser, "user '" + code + "' is not registered");
    }
    if (s.missions.count(id) != 0) throw std::runtime_error("mission id collision");
    for (const auto& code : config.searched_user_codes) {
      auto& u = s.users.at(code);
      u.in_search = true;
      u.updated_revision = s.revision;
    }
    auto m = std::make_shared<StoredMission>();
    m->record = sar::create_mission(id, config);
    m->world = std::move(world);
    m->updated_revision = s.revision;
    s.missions.emplace(id, std::move(m));
    return id;
  });
}

std::shared_ptr<const StoredMission> SarService::find_mission(const StoreSnapshot& s, const std::string& id) const {
  auto it = s.missions.find(id);
  if (it == s.missions.end()) throw Error(ErrorCode::UnknownMission, "no mission '" + id + "'");
  return it->second;
}

MissionPhase SarService::start_mission(const std::string& id) {
  return store_.commit([&](StoreSnapshot& s) {
    auto m = std::make_shared<StoredMission>(*find_mission(s, id));
    UserUrlDirectory users;
    for (const auto& [code, u] : s.users) users.emplace(code, beacon_url(u.short_url_path));
    sar::start_mission(m->record, users, *weather_);
    if (m->record.phase == MissionPhase::Planning) launch(m->record);
    m->updated_revision = s.revision;
    const auto phase = m->record.phase;
    s.missions[id] = std::move(m);
    return phase;
  });
}

MissionPhase SarService::advance_mission(const std::string& id, std::size_t max_ticks) {
  if (max_ticks == 0 || max_ticks > options_.max_ticks_per_advance) max_ticks = options_.max_ticks_per_advance;
  return store_.commit([&](StoreSnapshot& s) {
    auto m = std::make_shared<StoredMission>(*find_mission(s, id));
    if (m->record.phase != MissionPhase::Flying) {
      throw Error(ErrorCode::InvalidPhase, "mission is " + std::string(to_string(m->record.phase)));
    }
    advance(m->record, m->world, max_ticks, model_);
    m->updated_revision = s.revision;
    const auto phase = m->record.phase;
    s.missions[id] = std::move(m);
    return phase;
  });
}

PollResult SarService::poll(const std::string& id, std::uint64_t since) const {
  const auto snap = store_.snapshot();
  const auto m = find_mission(*snap, id);
  PollResult r;
  r.events = m->record.events_since(since);
  r.revision = std::max(since, m->record.last_seq());
  r.phase = m->record.phase;
  return r;
}

MissionResult SarService::results(const std::string& id) const {
  const auto snap = store_.snapshot();
  return mission_result(find_mission(*snap, id)->record);
}

std::string SarService::kml(const std::string& id) const {
  const auto snap = store_.snapshot();
  const auto m = find_mission(*snap, id);
  if (m->record.routes.empty()) {
    throw Error(ErrorCode::InvalidPhase, "mission has no routes yet (" + std::string(to_string(m->record.phase)) + ")");
  }
  KmlOptions opts;
  opts.document_name = "SAR mission " + id;
  return export_kml(m->record.routes, opts);
}

MissionRecord SarService::mission(const std::string& id) const {
  const auto snap = store_.snapshot();
  return find_mission(*snap, id)->record;
}

std::vector<std::pair<std::string, MissionPhase>> SarService::missions() const {
  const auto snap = store_.snapshot();
  std::vector<std::pair<std::string, MissionPhase>> out;
  for (const auto& [id, m] : snap->missions) out.emplace_back(id, m->record.phase);
  return out;
}

}  // namespace sar
