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
#ifndef CYCLOTRACK_BESTTRACK_HPP_
#define CYCLOTRACK_BESTTRACK_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cyclotrack/geodesy.hpp"
#include "cyclotrack/ingest.hpp"
#include "cyclotrack/time.hpp"

namespace cyclotrack {

// IMD wind-speed classes; the integer value is the label-file class id.
enum class IntensityClass : int {
  kD = 0,
  kDD = 1,
  kCS = 2,
  kSCS = 3,
  kVSCS = 4,
  kESCS = 5,
  kSuCS = 6,
};

inline constexpr int kNumIntensityClasses = 7;
inline constexpr std::array<IntensityClass, kNumIntensityClasses>
    kAllIntensityClasses = {IntensityClass::kD,    IntensityClass::kDD,
                            IntensityClass::kCS,   IntensityClass::kSCS,
                            IntensityClass::kVSCS, IntensityClass::kESCS,
                            IntensityClass::kSuCS};

// Lower bin edges in knots: [17,28) D, [28,34) DD, [34,48) CS, [48,64) SCS,
// [64,90) VSCS, [90,120) ESCS, [120,inf) SuCS.
inline constexpr std::array<double, kNumIntensityClasses> kClassLowerKt = {
    17.0, 28.0, 34.0, 48.0, 64.0, 90.0, 120.0};

// std::nullopt means below tropical-cyclone strength (< 17 kt).
std::optional<IntensityClass> classify_intensity(double wind_kt);

std::string_view class_name(IntensityClass c);  // "D", "DD", ..., "SuCS"
IntensityClass parse_class(std::string_view name);  // throws FormatError
constexpr int class_id(IntensityClass c) { return static_cast<int>(c); }
IntensityClass class_from_id(int id);  // throws FormatError

struct TrackFix {
  Instant timestamp;
  LatLon position;
  double wind_kt = 0.0;
  bool landfall = false;
};

struct InterpFix {
  Instant timestamp;
  LatLon position;
  double wind_kt = 0.0;
  std::optional<IntensityClass> intensity;
  // Set when either bracketing best-track fix carries the landfall flag.
  bool landfall = false;
};

class BestTrack {
 public:
  // Throws FormatError unless there are >= 2 fixes with strictly increasing
  // timestamps, non-negative winds, and positions inside the basin window.
  BestTrack(std::string event_id, std::string name, Basin basin,
            std::vector<TrackFix> fixes);

  const std::string& event_id() const noexcept { return event_id_; }
  const std::string& name() const noexcept { return name_; }
  Basin basin() const noexcept { return basin_; }
  const std::vector<TrackFix>& fixes() const noexcept { return fixes_; }

  Instant start() const noexcept { return fixes_.front().timestamp; }
  Instant end() const noexcept { return fixes_.back().timestamp; }
  bool active_at(Instant t) const noexcept { return t >= start() && t <= end(); }

 private:
  std::string event_id_;
  std::string name_;
  Basin basin_;
  std::vector<TrackFix> fixes_;
};

// Linear blend of the bracketing fixes. Throws OutOfWindowError outside the
// track span. The class is re-derived from the interpolated wind.
InterpFix interpolate_track(const BestTrack& track, Instant t);

struct TimeWindow {
  Instant start;
  Instant end;
};

TimeWindow event_window(const BestTrack& track);
std::vector<TimeWindow> event_windows(std::span<const BestTrack> tracks);

// CSV: event_id,name,basin,timestamp,lat,lon,wind_kt,landfall
// Rows are grouped by event_id (first-appearance order) and sorted by time.
std::vector<BestTrack> parse_besttrack_csv(std::istream& in);
std::vector<BestTrack> read_besttrack_csv(const std::filesystem::path& path);
void write_besttrack_csv(std::span<const BestTrack> tracks, std::ostream& out);
void write_besttrack_csv(std::span<const BestTrack> tracks,
                         const std::filesystem::path& path);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_BESTTRACK_HPP_
