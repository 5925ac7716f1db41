// SPDX-License-Identifier: Apache-2.0
#include "sar/store.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "sar/error.hpp"

namespace sar {

using nlohmann::json;

namespace {

constexpr int kStoreFormat = 1;

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptStore, what); }

json user_json(const UserRecord& u) {
  return {{"user_code", u.user_code},
          {"short_url_path", u.short_url_path},
          {"name", u.name_token},
          {"surname", u.surname_token},
          {"address", u.address_token},
          {"blood_type", u.blood_type_token},
          {"identity_digest", u.identity_digest},
          {"in_search", u.in_search},
          {"updated_revision", u.updated_revision}};
}

UserRecord user_from(const json& j) {
  UserRecord u;
  u.user_code = j.at("user_code").get<std::string>();
  u.short_url_path = j.at("short_url_path").get<std::string>();
  u.name_token = j.at("name").get<std::string>();
  u.surname_token = j.at("surname").get<std::string>();
  u.address_token = j.at("address").get<std::string>();
  u.blood_type_token = j.at("blood_type").get<std::string>();
  u.identity_digest = j.at("identity_digest").get<std::string>();
  u.in_search = j.at("in_search").get<bool>();
  u.updated_revision = j.at("updated_revision").get<std::uint64_t>();
  return u;
}

}  // namespace

const UserRecord* StoreSnapshot::user_by_path(const std::string& short_url_path) const {
  for (const auto& [code, u] : users) {
    if (u.short_url_path == short_url_path) return &u;
  }
  return nullptr;
}

json snapshot_to_json(const StoreSnapshot& s) {
  json j = {{"format", kStoreFormat}, {"revision", s.revision}, {"users", json::array()}, {"missions", json::array()}};
  for (const auto& [code, u] : s.users) j["users"].push_back(user_json(u));
  for (const auto& [id, m] : s.missions) {
    j["missions"].push_back({{"record", m->record}, {"world", m->world}, {"updated_revision", m->updated_revision}});
  }
  return j;
}

StoreSnapshot snapshot_from_json(const json& j, const KeyRing& keys) {
  StoreSnapshot s;
  try {
    if (j.at("format").get<int>() != kStoreFormat) corrupt("unsupported store format");
    s.revision = j.at("revision").get<std::uint64_t>();
    for (const auto& ju : j.at("users")) {
      auto u = user_from(ju);
      if (u.updated_revision > s.revision) corrupt("user " + u.user_code + " is newer than the store revision");
      for (const auto* token : {&u.name_token, &u.surname_token, &u.address_token, &u.blood_type_token}) {
        (void)decrypt_field(*token, keys);
      }
      for (const auto& [code, other] : s.users) {
        if (other.short_url_path == u.short_url_path) corrupt("duplicate short url path " + u.short_url_path);
      }
      if (!s.users.emplace(u.user_code, u).second) corrupt("duplicate user code " + u.user_code);
    }
    for (const auto& jm : j.at("missions")) {
      auto m = std::make_shared<StoredMission>();
      m->record = jm.at("record").get<MissionRecord>();
      m->world = jm.at("world").get<std::vector<SimulatedBeacon>>();
      m->updated_revision = jm.at("updated_revision").get<std::uint64_t>();
      if (m->updated_revision > s.revision) corrupt("mission " + m->record.id + " is newer than the store revision");
      const auto id = m->record.id;
      if (!s.missions.emplace(id, std::move(m)).second) corrupt("duplicate mission id " + id);
    }
  } catch (const json::exception& e) {
    corrupt(std::string("malformed store: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptStore) throw;
    corrupt(std::string("invalid store content: ") + e.what());
  }
  return s;
}

void persist(const StoreSnapshot& s, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << snapshot_to_json(s).dump();
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

StoreSnapshot load(const std::filesystem::path& path, const KeyRing& keys) {
  std::ifstream in(path, std::ios::binary);
  if (!in) corrupt("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) corrupt(path.string() + " is not valid JSON");
  return snapshot_from_json(j, keys);
}

Store::Store(const KeyRing& keys, std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (path_ && std::filesystem::exists(*path_)) {
    current_ = std::make_shared<const StoreSnapshot>(load(*path_, keys));
  } else {
    current_ = std::make_shared<const StoreSnapshot>();
  }
}

std::shared_ptr<const StoreSnapshot> Store::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

void Store::publish(std::shared_ptr<StoreSnapshot> next) {
  if (path_) persist(*next, *path_);
  std::lock_guard lock(read_mutex_);
  current_ = std::move(next);
}

}  // namespace sar
