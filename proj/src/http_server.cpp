// SPDX-License-Identifier: Apache-2.0
#include "sar/http_server.hpp"

#include <httplib.h>
#include <openssl/crypto.h>

#include <cstdlib>

namespace sar {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::MacMismatch:
    case ErrorCode::BadPadding:
    case ErrorCode::WrongVersion:
    case ErrorCode::MalformedEnvelope:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidPolygon:
    case ErrorCode::UnknownUser:
    case ErrorCode::UrlTooLong:
    case ErrorCode::UnsupportedScheme:
    case ErrorCode::InvalidUrl:
    case ErrorCode::DomainError:
      return 400;
    case ErrorCode::UnknownMission:
      return 404;
    case ErrorCode::InvalidPhase:
    case ErrorCode::MissionStillRunning:
    case ErrorCode::DuplicateUser:
      return 409;
    case ErrorCode::PayloadTooLarge:
      return 413;
    case ErrorCode::EmptyGrid:
    case ErrorCode::GridTooLarge:
    case ErrorCode::InvalidK:
    case ErrorCode::Unreachable:
      return 422;
    case ErrorCode::WeatherUnavailable:
      return 503;
    case ErrorCode::MalformedFrame:
    case ErrorCode::CorruptStore:
      return 500;
  }
  return 500;
}

ServerConfig ServerConfig::from_json(const json& j) {
  ServerConfig c;
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.bearer_token = j.value("bearer_token", std::string());
  if (j.contains("store_path")) c.store_path = j["store_path"].get<std::string>();
  c.service.public_base_url = j.value("public_base_url", c.service.public_base_url);
  if (j.contains("weather")) c.weather = j["weather"];
  if (const char* tok = std::getenv("SAR_BEARER_TOKEN")) c.bearer_token = tok;
  if (c.bearer_token.empty()) throw Error(ErrorCode::InvalidArgument, "a bearer token is required");
  return c;
}

std::shared_ptr<WeatherProvider> make_weather_provider(const json& spec) {
  if (spec.contains("stub")) return std::make_shared<StubWeatherProvider>(StubWeatherProvider::from_json(spec["stub"]));
  if (spec.contains("http")) {
    const auto& h = spec["http"];
    HttpWeatherOptions o;
    o.base_url = h.at("base_url").get<std::string>();
    o.path_template = h.value("path_template", o.path_template);
    o.wind_pointer = h.value("wind_pointer", o.wind_pointer);
    o.precipitation_pointer = h.value("precipitation_pointer", o.precipitation_pointer);
    o.precipitation_scale = h.value("precipitation_scale", o.precipitation_scale);
    o.timeout_s = h.value("timeout_s", o.timeout_s);
    return std::make_shared<HttpWeatherProvider>(o);
  }
  throw Error(ErrorCode::InvalidArgument, "weather must specify \"stub\" or \"http\"");
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  const int status = http_status(e.code());
  // Envelope failures all look the same from outside.
  std::string message;
  switch (e.code()) {
    case ErrorCode::MacMismatch:
    case ErrorCode::BadPadding:
    case ErrorCode::MalformedEnvelope:
    case ErrorCode::WrongVersion:
      message = std::string(external_message(e.code()));
      break;
    default:
      message = e.what();
  }
  const auto code = (e.code() == ErrorCode::BadPadding || e.code() == ErrorCode::MalformedEnvelope)
                        ? ErrorCode::MacMismatch
                        : e.code();
  send_json(res, status, {{"error", to_string(code)}, {"message", message}});
}

json phase_json(MissionPhase p) { return std::string(to_string(p)); }

std::uint64_t query_u64(const httplib::Request& req, const std::string& key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto v = req.get_param_value(key);
  char* end = nullptr;
  const auto n = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end == nullptr || *end != '\0') {
    throw Error(ErrorCode::ValidationError, key + " must be a non-negative integer");
  }
  return n;
}

}  // namespace

struct HttpServer::Impl {
  SarService& service;
  std::string token;
  httplib::Server server;

  Impl(SarService& s, std::string t) : service(s), token(std::move(t)) {}

  bool authorized(const httplib::Request& req) const {
    const auto header = req.get_header_value("Authorization");
    const std::string expected = "Bearer " + token;
    return header.size() == expected.size() && CRYPTO_memcmp(header.data(), expected.data(), header.size()) == 0;
  }

  template <class F>
  httplib::Server::Handler guarded(bool operator_only, F f) {
    return [this, operator_only, f](const httplib::Request& req, httplib::Response& res) {
      if (operator_only && !authorized(req)) {
        send_json(res, 401, {{"error", "Unauthorized"}, {"message", "operator token required"}});
        return;
      }
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_json(res, 400, {{"error", "ValidationError"}, {"message", e.what()}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
      }
    };
  }

  json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw Error(ErrorCode::ValidationError, "request body is not JSON");
    return body;
  }

  void routes() {
    server.Post("/users", guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  UserRegistration reg;
                  reg.name = body.value("name", std::string());
                  reg.surname = body.value("surname", std::string());
                  reg.address = body.value("address", std::string());
                  reg.blood_type = body.value("blood_type", std::string());
                  const auto u = service.register_user(reg);
                  send_json(res, 201,
                            {{"user_code", u.user_code}, {"short_url_path", u.short_url_path}, {"beacon_url", u.beacon_url}});
                }));

    server.Get(R"(/users/([^/]+))", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 const auto code = req.matches[1].str();
                 const auto p = service.profile(code);
                 send_json(res, 200,
                           {{"user_code", code},
                            {"name", p.name},
                            {"surname", p.surname},
                            {"address", p.address},
                            {"blood_type", p.blood_type},
                            {"in_search", service.in_search(code)}});
               }));

    server.Post(R"(/users/([^/]+)/close-search)",
                guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                  const auto code = req.matches[1].str();
                  service.close_search(code);
                  send_json(res, 200, {{"user_code", code}, {"in_search", false}});
                }));

    server.Get(R"(/b/([^/]+))", guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
                 const auto page = service.passive_lookup(req.matches[1].str());
                 if (!page) {
                   res.status = 404;
                   res.set_content("<!DOCTYPE html>\n<html><body><h1>404 Not Found</h1></body></html>\n",
                                   "text/html; charset=utf-8");
                   return;
                 }
                 res.status = 200;
                 res.set_content(*page, "text/html; charset=utf-8");
               }));

    server.Get("/missions", guarded(true, [this](const httplib::Request&, httplib::Response& res) {
                 json list = json::array();
                 for (const auto& [id, phase] : service.missions()) list.push_back({{"id", id}, {"phase", phase_json(phase)}});
                 send_json(res, 200, {{"missions", list}});
               }));

    server.Post("/missions", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  std::string id;
                  if (body.contains("envelope")) {
                    id = service.create_mission_sealed(body.at("envelope").get<std::string>());
                  } else {
                    id = service.create_mission(body);
                  }
                  send_json(res, 201, {{"id", id}, {"phase", phase_json(MissionPhase::Created)}});
                }));

    server.Get(R"(/missions/([^/]+))", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 const auto r = service.mission(req.matches[1].str());
                 json j = {{"id", r.id},
                           {"phase", phase_json(r.phase)},
                           {"revision", r.last_seq()},
                           {"config", r.config},
                           {"routes", r.routes},
                           {"grid_points", r.grid_points},
                           {"sim_time_s", r.sim_time_s},
                           {"reason", r.cancel_reason}};
                 send_json(res, 200, j);
               }));

    server.Post(R"(/missions/([^/]+)/start)",
                guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                  const auto id = req.matches[1].str();
                  const auto phase = service.start_mission(id);
                  const auto r = service.mission(id);
                  json j = {{"id", id}, {"phase", phase_json(phase)}, {"reason", r.cancel_reason}};
                  if (r.weather) j["weather"] = {{"go", r.weather->go}, {"reason", r.weather->reason}};
                  send_json(res, 200, j);
                }));

    server.Post(R"(/missions/([^/]+)/advance)",
                guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                  const auto id = req.matches[1].str();
                  const auto phase = service.advance_mission(id, query_u64(req, "ticks", 0));
                  send_json(res, 200, {{"id", id}, {"phase", phase_json(phase)}});
                }));

    server.Get(R"(/missions/([^/]+)/events)",
               guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 const auto p = service.poll(req.matches[1].str(), query_u64(req, "since", 0));
                 send_json(res, 200, {{"events", p.events}, {"revision", p.revision}, {"phase", phase_json(p.phase)}});
               }));

    server.Get(R"(/missions/([^/]+)/results)",
               guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, json(service.results(req.matches[1].str())));
               }));

    server.Get(R"(/missions/([^/]+)/kml)", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 const auto id = req.matches[1].str();
                 res.status = 200;
                 res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".kml\"");
                 res.set_content(service.kml(id), "application/vnd.google-earth.kml+xml");
               }));

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });
  }
};

HttpServer::HttpServer(SarService& service, std::string bearer_token)
    : impl_(std::make_unique<Impl>(service, std::move(bearer_token))) {
  if (impl_->token.empty()) throw Error(ErrorCode::InvalidArgument, "a bearer token is required");
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sar
