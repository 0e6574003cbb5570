/* Copyright 2026 The Cyclotrack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CYCLOTRACK_GEODESY_HPP_
#define CYCLOTRACK_GEODESY_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cyclotrack {

inline constexpr double kEarthRadiusKm = 6371.0;

struct LatLon {
  double lat = 0.0;  // degrees north
  double lon = 0.0;  // degrees east

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double deg2rad(double deg) {
  return deg * (std::numbers::pi / 180.0);
}
inline constexpr double rad2deg(double rad) {
  return rad * (180.0 / std::numbers::pi);
}

// Great-circle distance on a sphere of radius `radius_km`.
inline double haversine_km(LatLon a, LatLon b,
                           double radius_km = kEarthRadiusKm) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * radius_km * std::asin(std::sqrt(h));
}

// Initial bearing from `from` towards `to`, radians clockwise from north.
inline double initial_bearing(LatLon from, LatLon to) {
  const double phi1 = deg2rad(from.lat);
  const double phi2 = deg2rad(to.lat);
  const double dlambda = deg2rad(to.lon - from.lon);
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return std::atan2(y, x);
}

}  // namespace cyclotrack

#endif  // CYCLOTRACK_GEODESY_HPP_
