// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include <cstdio>

#include "sar/error.hpp"
#include "sar/mission.hpp"

namespace sar {

namespace {

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

WeatherReport HttpWeatherProvider::parse(const nlohmann::json& body, const HttpWeatherOptions& options) {
  try {
    WeatherReport r;
    r.wind_mps = body.at(nlohmann::json::json_pointer(options.wind_pointer)).get<double>();
    r.precipitation_probability =
        body.at(nlohmann::json::json_pointer(options.precipitation_pointer)).get<double>() * options.precipitation_scale;
    if (!(r.wind_mps >= 0.0) || !(r.precipitation_probability >= 0.0 && r.precipitation_probability <= 1.0)) {
      throw Error(ErrorCode::WeatherUnavailable, "forecast values out of range");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::WeatherUnavailable, std::string("unexpected forecast body: ") + e.what());
  }
}

WeatherReport HttpWeatherProvider::query(const GeoPoint& where) {
  std::string path = options_.path_template;
  replace_all(path, "{lat}", coord(where.lat));
  replace_all(path, "{lon}", coord(where.lon));

  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_s);
  client.set_read_timeout(options_.timeout_s);
  auto res = client.Get(path);
  if (!res) throw Error(ErrorCode::WeatherUnavailable, "forecast request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::WeatherUnavailable, "forecast endpoint returned HTTP " + std::to_string(res->status));
  }
  auto body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorCode::WeatherUnavailable, "forecast body is not JSON");
  return parse(body, options_);
}

}  // namespace sar
