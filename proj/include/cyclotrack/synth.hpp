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
#ifndef CYCLOTRACK_SYNTH_HPP_
#define CYCLOTRACK_SYNTH_HPP_

// Closed-form synthetic IR scenes: Gaussian cold cores with multiplicative
// spiral banding, composed into event lifecycles with exact ground truth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclotrack/besttrack.hpp"
#include "cyclotrack/ingest.hpp"

namespace cyclotrack {

inline constexpr double kSynthBackgroundK = 295.0;
inline constexpr double kSynthMinK = 180.0;
inline constexpr double kSynthMaxK = 310.0;
inline constexpr double kMaxColdDepthK = 120.0;

struct VortexParams {
  LatLon center;
  double peak_wind_kt = 0.0;
  double core_sigma_km = 150.0;
  double cold_depth_k = 0.0;
  int band_count = 0;
  // Relative modulation depth of the spiral bands, >= 0.
  double band_amplitude = 0.0;
  double phase = 0.0;  // radians

  // Throws InvalidArgument unless sigma > 0, 0 <= depth <= 120, wind >= 0,
  // bands >= 0 and amplitude >= 0.
  void validate() const;
};

// Appearance tied to strength: depth = min(110, 0.8 K/kt * wind),
// sigma = 150 km + 1 km/kt * wind.
inline constexpr double kKelvinPerKt = 0.8;
inline constexpr double kMaxEventDepthK = 110.0;
inline constexpr double kBaseSigmaKm = 150.0;
inline constexpr double kSigmaKmPerKt = 1.0;
VortexParams vortex_for_wind(LatLon center, double wind_kt, int band_count = 0,
                             double band_amplitude = 0.0, double phase = 0.0);

struct SceneOptions {
  double background_k = kSynthBackgroundK;
  double noise_sd_k = 0.0;
  std::uint64_t seed = 0;
  Instant timestamp{};
};

struct Scene {
  Granule granule;
  std::vector<VortexParams> vortices;
};

// Brightness temperature of one pixel before noise and clamping.
double vortex_field_k(std::span<const VortexParams> vortices, LatLon p,
                      double background_k = kSynthBackgroundK);

// Every pixel centre sampled from vortex_field_k, plus N(0, noise_sd) drawn
// in row-major order, clamped to [180, 310] K. Throws OutOfGridError for a
// vortex centre outside the grid.
Scene render_scene(const GridSpec& grid, std::span<const VortexParams> vortices,
                   const SceneOptions& options = {});

// ---- Event scripts -----------------------------------------------------------

struct ScriptKnot {
  Instant timestamp;
  LatLon position;
  double wind_kt = 0.0;
};

// Piecewise-linear wind and track between knots; genesis and dissipation
// are the first and last knots.
struct EventScript {
  std::string event_id;
  std::string name;
  Basin basin = Basin::kArabianSea;
  std::vector<ScriptKnot> knots;
  int band_count = 2;
  double band_amplitude = 0.25;
  double phase = 0.0;
  // Best-track fixes inside this span carry the landfall flag.
  std::optional<TimeWindow> landfall;

  Instant genesis() const { return knots.front().timestamp; }
  Instant dissipation() const { return knots.back().timestamp; }
  // Throws InvalidArgument unless >= 2 knots, increasing times, winds >= 0.
  void validate() const;
};

// Interpolated knot at `t`. Throws OutOfWindowError outside the script.
ScriptKnot script_at(const EventScript& script, Instant t);

struct TruthSample {
  std::string event_id;
  Instant timestamp;
  LatLon position;
  double wind_kt = 0.0;
  std::optional<IntensityClass> intensity;
};

struct RenderOptions {
  Duration cadence = minutes(30);
  Duration best_track_interval = hours(3);
  // Frames rendered before genesis and after dissipation of the whole set.
  Duration pad = Duration::zero();
  double background_k = kSynthBackgroundK;
  double noise_sd_k = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  std::vector<Granule> frames;
  std::vector<BestTrack> tracks;  // one per script, best_track_interval fixes
  std::vector<TruthSample> truth;  // every frame x active script
};

// Frames sit on a cadence lattice starting at the earliest genesis minus
// `pad`; frame k uses seed ^ k. All scripts active at a frame are composed
// into that frame.
SyntheticCorpus render_events(std::span<const EventScript> scripts,
                              const GridSpec& grid,
                              const RenderOptions& options = {});
SyntheticCorpus render_event(const EventScript& script, const GridSpec& grid,
                             const RenderOptions& options = {});

// Best track sampled from the script every `interval` plus the final knot.
BestTrack script_best_track(const EventScript& script, Duration interval);

// JSON lines: event_id, timestamp, lat, lon, wind_kt, class.
void write_truth_jsonl(std::span<const TruthSample> truth,
                       const std::filesystem::path& path);
std::vector<TruthSample> read_truth_jsonl(const std::filesystem::path& path);

// Randomized but valid scripts inside `basin`: a straight-line track of
// `duration` with a rise-and-decay wind curve peaking at `peak_wind_kt`.
EventScript random_script(std::string event_id, Basin basin, Instant genesis,
                          Duration duration, double peak_wind_kt,
                          std::uint64_t seed);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_SYNTH_HPP_
