// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "sar/error.hpp"
#include "sar/service.hpp"

namespace sar {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string bearer_token;
  std::optional<std::filesystem::path> store_path;
  ServiceOptions service{};
  /// {"stub": {"wind_mps": .., "precipitation_probability": ..}} or
  /// {"http": {"base_url": .., "path_template": .., ...}}.
  nlohmann::json weather = {{"stub", {{"wind_mps", 0.0}, {"precipitation_probability", 0.0}}}};

  /// Keys: host, port, bearer_token, store_path, public_base_url, weather.
  /// SAR_BEARER_TOKEN in the environment overrides the file.
  static ServerConfig from_json(const nlohmann::json& j);
};

std::shared_ptr<WeatherProvider> make_weather_provider(const nlohmann::json& spec);

/// HTTP status for a library error.
int http_status(ErrorCode code);

/// JSON API in front of a SarService.
///
///   POST /users                      register (open)
///   GET  /users/{code}               decrypted profile (operator)
///   POST /users/{code}/close-search  end the search (operator)
///   GET  /b/{path}                   passive-method page or 404 (open)
///   GET  /missions                   list (operator)
///   POST /missions                   {"envelope": b64} or {"config":..,"world":..}
///   GET  /missions/{id}              status
///   POST /missions/{id}/start        weather gate, plan, launch
///   POST /missions/{id}/advance      ?ticks=N simulation steps
///   GET  /missions/{id}/events       ?since=N
///   GET  /missions/{id}/results
///   GET  /missions/{id}/kml
class HttpServer {
 public:
  HttpServer(SarService& service, std::string bearer_token);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Blocks until stop(). Returns false if the socket could not be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; call serve() afterwards.
  int bind_any_port(const std::string& host);
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sar
