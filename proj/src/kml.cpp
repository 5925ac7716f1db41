// SPDX-License-Identifier: Apache-2.0
#include "sar/kml.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <string_view>

#include "sar/error.hpp"

namespace sar {

namespace {

// aabbggrr, cycled per drone.
constexpr std::array<std::string_view, 6> kLineColors = {"ff0000ff", "ffff0000", "ff00aa00",
                                                         "ff00ffff", "ffff00ff", "ffffff00"};

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string triple(const GeoPoint& p, double alt) {
  return format_fixed7(p.lon) + "," + format_fixed7(p.lat) + "," + format_fixed7(alt);
}

}  // namespace

std::string format_fixed7(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.7f", v);
  std::string s(buf.data());
  if (s == "-0.0000000") s = "0.0000000";
  return s;
}

std::string export_kml(std::span<const Route> routes, const KmlOptions& options) {
  if (routes.empty()) throw Error(ErrorCode::InvalidArgument, "no routes to export");
  for (const auto& r : routes) {
    if (r.waypoints.empty()) throw Error(ErrorCode::InvalidArgument, "route without waypoints");
  }
  const GeoPoint& base = routes.front().waypoints.front();

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n"
      << "  <Document>\n"
      << "    <name>" << escape_xml(options.document_name) << "</name>\n";
  for (std::size_t i = 0; i < routes.size(); ++i) {
    out << "    <Style id=\"drone-" << routes[i].drone_id << "\">\n"
        << "      <LineStyle>\n"
        << "        <color>" << kLineColors[i % kLineColors.size()] << "</color>\n"
        << "        <width>3</width>\n"
        << "      </LineStyle>\n"
        << "    </Style>\n";
  }
  out << "    <Placemark>\n"
      << "      <name>Base</name>\n"
      << "      <Point>\n"
      << "        <coordinates>" << triple(base, 0.0) << "</coordinates>\n"
      << "      </Point>\n"
      << "    </Placemark>\n";
  for (const auto& r : routes) {
    out << "    <Placemark>\n"
        << "      <name>Drone " << r.drone_id << "</name>\n"
        << "      <description>" << r.waypoints.size() << " waypoints, " << format_fixed7(r.total_length_m)
        << " m</description>\n"
        << "      <styleUrl>#drone-" << r.drone_id << "</styleUrl>\n"
        << "      <LineString>\n"
        << "        <tessellate>1</tessellate>\n"
        << "        <altitudeMode>relativeToGround</altitudeMode>\n"
        << "        <coordinates>";
    for (std::size_t k = 0; k < r.waypoints.size(); ++k) {
      if (k != 0) out << ' ';
      out << triple(r.waypoints[k], r.altitude_m);
    }
    out << "</coordinates>\n"
        << "      </LineString>\n"
        << "    </Placemark>\n";
  }
  out << "  </Document>\n"
      << "</kml>\n";
  return out.str();
}

}  // namespace sar
