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
#include "cyclotrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cyclotrack/random.hpp"
#include "json.hpp"

namespace cyclotrack {

void VortexParams::validate() const {
  if (!(core_sigma_km > 0.0)) throw InvalidArgument("core_sigma must be > 0");
  if (!(cold_depth_k >= 0.0 && cold_depth_k <= kMaxColdDepthK)) {
    throw InvalidArgument("cold depth must lie in [0, 120] K");
  }
  if (!(peak_wind_kt >= 0.0)) throw InvalidArgument("peak wind must be >= 0");
  if (band_count < 0) throw InvalidArgument("band count must be >= 0");
  if (!(band_amplitude >= 0.0)) throw InvalidArgument("band amplitude must be >= 0");
}

VortexParams vortex_for_wind(LatLon center, double wind_kt, int band_count,
                             double band_amplitude, double phase) {
  VortexParams v;
  v.center = center;
  v.peak_wind_kt = wind_kt;
  v.cold_depth_k = std::min(kMaxEventDepthK, kKelvinPerKt * wind_kt);
  v.core_sigma_km = kBaseSigmaKm + kSigmaKmPerKt * wind_kt;
  v.band_count = band_count;
  v.band_amplitude = band_amplitude;
  v.phase = phase;
  v.validate();
  return v;
}

namespace {

double Contribution(const VortexParams& v, double r_km, double theta) {
  const double s = r_km / v.core_sigma_km;
  const double band =
      (1.0 + v.band_amplitude * std::cos(v.band_count * theta - s - v.phase)) /
      (1.0 + v.band_amplitude);
  return v.cold_depth_k * std::exp(-s * s) * band;
}

// Beyond this many sigmas a core contributes < 1e-13 K.
constexpr double kCutoffSigmas = 6.0;

}  // namespace

double vortex_field_k(std::span<const VortexParams> vortices, LatLon p,
                      double background_k) {
  double t = background_k;
  for (const VortexParams& v : vortices) {
    t -= Contribution(v, haversine_km(v.center, p), initial_bearing(v.center, p));
  }
  return t;
}

Scene render_scene(const GridSpec& grid, std::span<const VortexParams> vortices,
                   const SceneOptions& options) {
  for (const VortexParams& v : vortices) {
    v.validate();
    if (!grid.contains(v.center)) {
      throw OutOfGridError("vortex centre outside the scene grid");
    }
  }
  const int rows = grid.rows();
  const int cols = grid.cols();
  Raster<double> field(rows, cols, options.background_k);

  // Separable trig tables; the per-pixel arithmetic mirrors haversine_km and
  // initial_bearing term for term.
  std::vector<double> lat(static_cast<std::size_t>(rows));
  std::vector<double> lon(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    lat[static_cast<std::size_t>(r)] = grid.lat_north() - (r + 0.5) * grid.lat_span() / rows;
  }
  for (int c = 0; c < cols; ++c) {
    lon[static_cast<std::size_t>(c)] = grid.lon_west() + (c + 0.5) * grid.lon_span() / cols;
  }
  std::vector<double> s2(static_cast<std::size_t>(cols));
  std::vector<double> sin_dl(static_cast<std::size_t>(cols));
  std::vector<double> cos_dl(static_cast<std::size_t>(cols));
  for (const VortexParams& v : vortices) {
    const double phi1 = deg2rad(v.center.lat);
    const double cos1 = std::cos(phi1);
    const double sin1 = std::sin(phi1);
    for (int c = 0; c < cols; ++c) {
      const double dl = deg2rad(lon[static_cast<std::size_t>(c)] - v.center.lon);
      s2[static_cast<std::size_t>(c)] = std::sin(dl / 2.0);
      sin_dl[static_cast<std::size_t>(c)] = std::sin(dl);
      cos_dl[static_cast<std::size_t>(c)] = std::cos(dl);
    }
    const double cutoff = kCutoffSigmas * v.core_sigma_km;
    for (int r = 0; r < rows; ++r) {
      const double phi2 = deg2rad(lat[static_cast<std::size_t>(r)]);
      const double dphi = phi2 - phi1;
      if (kEarthRadiusKm * std::abs(dphi) > cutoff) continue;
      const double s1 = std::sin(dphi / 2.0);
      const double cos2 = std::cos(phi2);
      const double sin2 = std::sin(phi2);
      for (int c = 0; c < cols; ++c) {
        const std::size_t ci = static_cast<std::size_t>(c);
        double h = s1 * s1 + cos1 * cos2 * s2[ci] * s2[ci];
        h = std::clamp(h, 0.0, 1.0);
        const double dist = 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
        if (dist > cutoff) continue;
        const double theta = std::atan2(sin_dl[ci] * cos2,
                                        cos1 * sin2 - sin1 * cos2 * cos_dl[ci]);
        field(r, c) -= Contribution(v, dist, theta);
      }
    }
  }

  Scene scene;
  scene.vortices.assign(vortices.begin(), vortices.end());
  scene.granule.grid = grid;
  scene.granule.timestamp = options.timestamp;
  scene.granule.bt = Raster<float>(rows, cols);
  Rng rng(options.seed);
  const bool noisy = options.noise_sd_k > 0.0;
  auto& out = scene.granule.bt.data();
  const auto& in = field.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    double t = in[i];
    if (noisy) t += options.noise_sd_k * rng.normal();
    out[i] = static_cast<float>(std::clamp(t, kSynthMinK, kSynthMaxK));
  }
  return scene;
}

// ---- Event scripts -----------------------------------------------------------

void EventScript::validate() const {
  if (knots.size() < 2) throw InvalidArgument("event script needs >= 2 knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].wind_kt >= 0.0)) throw InvalidArgument("wind curve must be >= 0");
    if (i > 0 && knots[i].timestamp <= knots[i - 1].timestamp) {
      throw InvalidArgument("script knots must be strictly increasing in time");
    }
  }
}

ScriptKnot script_at(const EventScript& script, Instant t) {
  const auto& k = script.knots;
  if (k.empty() || t < k.front().timestamp || t > k.back().timestamp) {
    throw OutOfWindowError(format_iso8601(t) + " outside script " + script.event_id);
  }
  auto hi = std::upper_bound(k.begin(), k.end(), t, [](Instant v, const ScriptKnot& n) {
    return v < n.timestamp;
  });
  if (hi == k.end()) return k.back();
  const ScriptKnot& b = *hi;
  const ScriptKnot& a = *(hi - 1);
  if (a.timestamp == t) return a;
  const double f = static_cast<double>((t - a.timestamp).count()) /
                   static_cast<double>((b.timestamp - a.timestamp).count());
  return {t,
          {a.position.lat + f * (b.position.lat - a.position.lat),
           a.position.lon + f * (b.position.lon - a.position.lon)},
          a.wind_kt + f * (b.wind_kt - a.wind_kt)};
}

BestTrack script_best_track(const EventScript& script, Duration interval) {
  script.validate();
  if (interval <= Duration::zero()) throw InvalidArgument("interval must be > 0");
  std::vector<TrackFix> fixes;
  auto add = [&](Instant t) {
    const ScriptKnot k = script_at(script, t);
    const bool landfall = script.landfall && t >= script.landfall->start &&
                          t <= script.landfall->end;
    fixes.push_back({t, k.position, k.wind_kt, landfall});
  };
  for (Instant t = script.genesis(); t < script.dissipation(); t += interval) add(t);
  add(script.dissipation());
  return BestTrack(script.event_id, script.name, script.basin, std::move(fixes));
}

SyntheticCorpus render_events(std::span<const EventScript> scripts,
                              const GridSpec& grid, const RenderOptions& options) {
  if (scripts.empty()) throw InvalidArgument("no event scripts");
  if (options.cadence <= Duration::zero()) throw InvalidArgument("cadence must be > 0");
  if (options.pad < Duration::zero()) throw InvalidArgument("pad must be >= 0");
  SyntheticCorpus corpus;
  Instant first = scripts.front().genesis();
  Instant last = scripts.front().dissipation();
  for (const EventScript& s : scripts) {
    s.validate();
    corpus.tracks.push_back(script_best_track(s, options.best_track_interval));
    first = std::min(first, s.genesis());
    last = std::max(last, s.dissipation());
  }
  first -= options.pad;
  last += options.pad;

  std::uint64_t k = 0;
  for (Instant t = first; t <= last; t += options.cadence, ++k) {
    std::vector<VortexParams> vortices;
    for (const EventScript& s : scripts) {
      if (t < s.genesis() || t > s.dissipation()) continue;
      const ScriptKnot knot = script_at(s, t);
      vortices.push_back(vortex_for_wind(knot.position, knot.wind_kt, s.band_count,
                                         s.band_amplitude, s.phase));
      corpus.truth.push_back(
          {s.event_id, t, knot.position, knot.wind_kt, classify_intensity(knot.wind_kt)});
    }
    SceneOptions so;
    so.background_k = options.background_k;
    so.noise_sd_k = options.noise_sd_k;
    so.seed = options.seed ^ k;
    so.timestamp = t;
    corpus.frames.push_back(render_scene(grid, vortices, so).granule);
  }
  return corpus;
}

SyntheticCorpus render_event(const EventScript& script, const GridSpec& grid,
                             const RenderOptions& options) {
  return render_events(std::span<const EventScript>(&script, 1), grid, options);
}

void write_truth_jsonl(std::span<const TruthSample> truth,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const TruthSample& s : truth) {
    nlohmann::ordered_json j;
    j["event_id"] = s.event_id;
    j["timestamp"] = format_iso8601(s.timestamp);
    j["lat"] = s.position.lat;
    j["lon"] = s.position.lon;
    j["wind_kt"] = s.wind_kt;
    j["class"] = s.intensity ? nlohmann::ordered_json(std::string(class_name(*s.intensity)))
                             : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

std::vector<TruthSample> read_truth_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<TruthSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TruthSample s;
      s.event_id = j.at("event_id").get<std::string>();
      s.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
      s.position = {j.at("lat").get<double>(), j.at("lon").get<double>()};
      s.wind_kt = j.at("wind_kt").get<double>();
      s.intensity = classify_intensity(s.wind_kt);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

EventScript random_script(std::string event_id, Basin basin, Instant genesis,
                          Duration duration, double peak_wind_kt,
                          std::uint64_t seed) {
  if (duration <= Duration::zero()) throw InvalidArgument("duration must be > 0");
  if (!(peak_wind_kt >= 0.0)) throw InvalidArgument("peak wind must be >= 0");
  Rng rng(seed);
  const GridSpec g = basin_grid(basin);
  // Keep tracks well inside the window so every fix validates.
  const double margin_lat = 0.2 * g.lat_span();
  const double margin_lon = 0.2 * g.lon_span();
  auto point = [&] {
    return LatLon{rng.uniform(g.lat_south() + margin_lat, g.lat_north() - margin_lat),
                  rng.uniform(g.lon_west() + margin_lon, g.lon_east() - margin_lon)};
  };
  const LatLon a = point();
  const LatLon b = point();
  const double peak_frac = rng.uniform(0.35, 0.65);
  const double start_wind = std::min(peak_wind_kt, 20.0);
  const auto peak_t = genesis + std::chrono::duration_cast<Duration>(duration * peak_frac);
  const auto end_t = genesis + duration;
  auto at = [&](double f) {
    return LatLon{a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
  };
  EventScript s;
  s.event_id = event_id;
  s.name = std::move(event_id);
  s.basin = basin;
  s.knots = {{genesis, a, start_wind},
             {peak_t, at(peak_frac), peak_wind_kt},
             {end_t, b, start_wind}};
  s.band_count = 2;
  s.band_amplitude = 0.25;
  s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return s;
}

}  // namespace cyclotrack
