// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "sar/routing.hpp"

namespace sar {

struct KmlOptions {
  std::string document_name = "SAR mission";
};

/// KML 2.2 document with a base Placemark and one LineString per route.
/// Coordinates are lon,lat,alt with 7 fractional digits; altitudes are
/// relative to ground. Throws InvalidArgument on an empty route list.
std::string export_kml(std::span<const Route> routes, const KmlOptions& options = {});

/// Fixed-point rendering used for KML coordinates ("-0.0000000" never appears).
std::string format_fixed7(double v);

}  // namespace sar
