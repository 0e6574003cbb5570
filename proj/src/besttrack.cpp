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
#include "cyclotrack/besttrack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "cyclotrack/error.hpp"

namespace cyclotrack {

namespace {
constexpr std::array<std::string_view, kNumIntensityClasses> kClassNames = {
    "D", "DD", "CS", "SCS", "VSCS", "ESCS", "SuCS"};
constexpr std::string_view kCsvHeader =
    "event_id,name,basin,timestamp,lat,lon,wind_kt,landfall";
}  // namespace

std::optional<IntensityClass> classify_intensity(double wind_kt) {
  if (!(wind_kt >= kClassLowerKt[0])) return std::nullopt;
  int idx = 0;
  for (int k = 1; k < kNumIntensityClasses; ++k) {
    if (wind_kt >= kClassLowerKt[static_cast<std::size_t>(k)]) idx = k;
  }
  return static_cast<IntensityClass>(idx);
}

std::string_view class_name(IntensityClass c) {
  return kClassNames[static_cast<std::size_t>(class_id(c))];
}

IntensityClass parse_class(std::string_view name) {
  for (int k = 0; k < kNumIntensityClasses; ++k) {
    if (kClassNames[static_cast<std::size_t>(k)] == name) {
      return static_cast<IntensityClass>(k);
    }
  }
  throw FormatError("unknown intensity class '" + std::string(name) + "'");
}

IntensityClass class_from_id(int id) {
  if (id < 0 || id >= kNumIntensityClasses) {
    throw FormatError("class id out of range: " + std::to_string(id));
  }
  return static_cast<IntensityClass>(id);
}

BestTrack::BestTrack(std::string event_id, std::string name, Basin basin,
                     std::vector<TrackFix> fixes)
    : event_id_(std::move(event_id)),
      name_(std::move(name)),
      basin_(basin),
      fixes_(std::move(fixes)) {
  if (fixes_.size() < 2) {
    throw FormatError("best track " + event_id_ + " needs at least 2 fixes");
  }
  const GridSpec window = basin_grid(basin_);
  for (std::size_t i = 0; i < fixes_.size(); ++i) {
    const TrackFix& f = fixes_[i];
    if (i > 0 && !(f.timestamp > fixes_[i - 1].timestamp)) {
      throw FormatError("best track " + event_id_ +
                        ": timestamps must be strictly increasing");
    }
    if (!(f.wind_kt >= 0.0) || !std::isfinite(f.wind_kt)) {
      throw FormatError("best track " + event_id_ + ": negative wind");
    }
    if (!window.contains(f.position)) {
      throw FormatError("best track " + event_id_ + ": fix at " +
                        format_iso8601(f.timestamp) +
                        " lies outside the basin window");
    }
  }
}

InterpFix interpolate_track(const BestTrack& track, Instant t) {
  const auto& fixes = track.fixes();
  if (t < track.start() || t > track.end()) {
    throw OutOfWindowError(format_iso8601(t) + " outside track " +
                           track.event_id());
  }
  // First fix strictly after t; the bracket is [hi-1, hi].
  auto hi = std::upper_bound(
      fixes.begin(), fixes.end(), t,
      [](Instant v, const TrackFix& f) { return v < f.timestamp; });
  if (hi == fixes.end()) hi = std::prev(fixes.end());
  const TrackFix& a = *std::prev(hi);
  const TrackFix& b = *hi;

  InterpFix out;
  out.timestamp = t;
  if (t == a.timestamp) {
    out.position = a.position;
    out.wind_kt = a.wind_kt;
    out.landfall = a.landfall;
  } else if (t == b.timestamp) {
    out.position = b.position;
    out.wind_kt = b.wind_kt;
    out.landfall = b.landfall;
  } else {
    const double alpha = static_cast<double>((t - a.timestamp).count()) /
                         static_cast<double>((b.timestamp - a.timestamp).count());
    auto lerp = [alpha](double x, double y) { return x + alpha * (y - x); };
    out.position = {lerp(a.position.lat, b.position.lat),
                    lerp(a.position.lon, b.position.lon)};
    out.wind_kt = lerp(a.wind_kt, b.wind_kt);
    out.landfall = a.landfall || b.landfall;
  }
  out.intensity = classify_intensity(out.wind_kt);
  return out;
}

TimeWindow event_window(const BestTrack& track) {
  return {track.start(), track.end()};
}

std::vector<TimeWindow> event_windows(std::span<const BestTrack> tracks) {
  std::vector<TimeWindow> out;
  out.reserve(tracks.size());
  for (const BestTrack& t : tracks) out.push_back(event_window(t));
  return out;
}

// ---- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double ParseDouble(std::string_view text, int line_no) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw FormatError("best-track line " + std::to_string(line_no) +
                      ": bad number '" + std::string(text) + "'");
  }
  return v;
}

bool ParseFlag(std::string_view text, int line_no) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw FormatError("best-track line " + std::to_string(line_no) +
                    ": bad landfall flag '" + std::string(text) + "'");
}

}  // namespace

std::vector<BestTrack> parse_besttrack_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("best-track CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw FormatError("best-track CSV header must be '" +
                      std::string(kCsvHeader) + "'");
  }

  struct Pending {
    std::string name;
    Basin basin;
    std::vector<TrackFix> fixes;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> events;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 8) {
      throw FormatError("best-track line " + std::to_string(line_no) +
                        ": expected 8 fields, found " +
                        std::to_string(f.size()));
    }
    const std::string id(f[0]);
    if (id.empty()) {
      throw FormatError("best-track line " + std::to_string(line_no) +
                        ": empty event_id");
    }
    const Basin basin = parse_basin(f[2]);
    TrackFix fix;
    fix.timestamp = parse_iso8601(f[3]);
    fix.position = {ParseDouble(f[4], line_no), ParseDouble(f[5], line_no)};
    fix.wind_kt = ParseDouble(f[6], line_no);
    fix.landfall = ParseFlag(f[7], line_no);

    auto it = events.find(id);
    if (it == events.end()) {
      order.push_back(id);
      it = events.emplace(id, Pending{std::string(f[1]), basin, {}}).first;
    } else if (it->second.basin != basin || it->second.name != f[1]) {
      throw FormatError("best-track line " + std::to_string(line_no) +
                        ": inconsistent name/basin for event " + id);
    }
    it->second.fixes.push_back(fix);
  }

  std::vector<BestTrack> out;
  out.reserve(order.size());
  for (const std::string& id : order) {
    Pending& p = events.at(id);
    std::stable_sort(p.fixes.begin(), p.fixes.end(),
                     [](const TrackFix& a, const TrackFix& b) {
                       return a.timestamp < b.timestamp;
                     });
    out.emplace_back(id, p.name, p.basin, std::move(p.fixes));
  }
  return out;
}

std::vector<BestTrack> read_besttrack_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_besttrack_csv(in);
}

void write_besttrack_csv(std::span<const BestTrack> tracks, std::ostream& out) {
  out << kCsvHeader << "\n";
  char buf[128];
  for (const BestTrack& t : tracks) {
    for (const TrackFix& f : t.fixes()) {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.3f,%d", f.position.lat,
                    f.position.lon, f.wind_kt, f.landfall ? 1 : 0);
      out << t.event_id() << "," << t.name() << "," << basin_name(t.basin())
          << "," << format_iso8601(f.timestamp) << "," << buf << "\n";
    }
  }
}

void write_besttrack_csv(std::span<const BestTrack> tracks,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  write_besttrack_csv(tracks, out);
}

}  // namespace cyclotrack
