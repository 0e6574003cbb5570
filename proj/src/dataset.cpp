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
#include "cyclotrack/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cyclotrack/random.hpp"
#include "json.hpp"

namespace cyclotrack {

// ---- Box sizes and labels ----------------------------------------------------

BoxSizeConfig::BoxSizeConfig(std::array<int, kNumIntensityClasses> sides)
    : sides_(sides) {
  for (int s : sides_) {
    if (s < 50 || s > kBasinImageSize) {
      throw InvalidArgument("box side " + std::to_string(s) +
                            " outside [50, 1035]");
    }
  }
}

BoxSizeConfig BoxSizeConfig::uniform300() {
  return BoxSizeConfig({300, 300, 300, 300, 300, 300, 300});
}

BoxSizeConfig BoxSizeConfig::uniform500() {
  return BoxSizeConfig({500, 500, 500, 500, 500, 500, 500});
}

BoxSizeConfig BoxSizeConfig::custom() {
  return BoxSizeConfig({400, 400, 400, 400, 400, 300, 300});
}

BoxSizeConfig BoxSizeConfig::preset(std::string_view name) {
  if (name == "300") return uniform300();
  if (name == "500") return uniform500();
  if (name == "custom") return custom();
  throw ConfigError("unknown box preset '" + std::string(name) +
                    "' (expected 300, 500 or custom)");
}

DetectionLabel make_detection_label(const GridSpec& grid, const InterpFix& fix,
                                    const BoxSizeConfig& cfg) {
  const PixelCoord px = latlon_to_pixel(grid, fix.position);
  if (!fix.intensity) {
    throw InvalidArgument("fix at " + format_iso8601(fix.timestamp) +
                          " is below tropical-cyclone strength");
  }
  const double half = cfg.side(*fix.intensity) / 2.0;
  const double half_x = std::min({half, px.x, grid.cols() - px.x});
  const double half_y = std::min({half, px.y, grid.rows() - px.y});
  DetectionLabel out;
  out.class_id = class_id(*fix.intensity);
  out.cx = px.x / grid.cols();
  out.cy = px.y / grid.rows();
  out.w = 2.0 * std::max(half_x, 0.0) / grid.cols();
  out.h = 2.0 * std::max(half_y, 0.0) / grid.rows();
  return out;
}

LatLon label_center(const GridSpec& grid, const DetectionLabel& label) {
  return pixel_to_latlon(grid, {label.cx * grid.cols(), label.cy * grid.rows()});
}

std::string format_label_line(const DetectionLabel& label) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f", label.class_id,
                label.cx, label.cy, label.w, label.h);
  return buf;
}

DetectionLabel parse_label_line(std::string_view line) {
  std::istringstream is{std::string(line)};
  DetectionLabel out;
  std::string extra;
  if (!(is >> out.class_id >> out.cx >> out.cy >> out.w >> out.h) ||
      (is >> extra)) {
    throw FormatError("bad label line '" + std::string(line) + "'");
  }
  class_from_id(out.class_id);
  for (double v : {out.cx, out.cy, out.w, out.h}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw FormatError("label value outside [0,1] in '" + std::string(line) +
                        "'");
    }
  }
  return out;
}

void write_label_file(std::span<const DetectionLabel> labels,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const DetectionLabel& l : labels) out << format_label_line(l) << "\n";
}

std::vector<DetectionLabel> read_label_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<DetectionLabel> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_label_line(line));
  }
  return out;
}

// ---- No-Cyclone sampling -----------------------------------------------------

std::optional<NcPlacement> nc_placement(std::span<const BestTrack> events,
                                        Instant t) {
  std::optional<NcPlacement> best;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const BestTrack& e = events[i];
    if (e.active_at(t)) return std::nullopt;
    const Duration d = t < e.start() ? e.start() - t : t - e.end();
    if (!best || d < best->distance) best = NcPlacement{d, i};
  }
  return best;
}

std::optional<NcType> nc_type_for(std::span<const BestTrack> events,
                                  Instant t) {
  const auto p = nc_placement(events, t);
  if (!p) return std::nullopt;
  if (p->distance > Duration::zero() && p->distance <= kNcTypeIMax) {
    return NcType::kTypeI;
  }
  if (p->distance > kNcTypeIMax && p->distance <= kNcTypeIIMax) {
    return NcType::kTypeII;
  }
  return std::nullopt;
}

std::vector<Instant> nc_candidates(
    std::span<const BestTrack> events, NcType type, Duration step,
    std::optional<std::span<const Instant>> available) {
  std::vector<Instant> out;
  if (events.empty()) return out;
  if (step <= Duration::zero()) throw InvalidArgument("step must be positive");
  if (available) {
    for (Instant t : *available) {
      if (nc_type_for(events, t) == type) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  Instant lo = events.front().start();
  Instant hi = events.front().end();
  for (const BestTrack& e : events) {
    lo = std::min(lo, e.start());
    hi = std::max(hi, e.end());
  }
  lo -= kNcTypeIIMax;
  hi += kNcTypeIIMax;
  // Align to the lattice of multiples of `step`.
  const auto s = step.count();
  auto first = lo.time_since_epoch().count();
  first = (first / s) * s - (first % s < 0 ? s : 0);
  for (Instant t{Duration{first}}; t <= hi; t += step) {
    if (t < lo) continue;
    if (nc_type_for(events, t) == type) out.push_back(t);
  }
  return out;
}

std::vector<Instant> sample_nc_timestamps(
    std::span<const BestTrack> events, const NCSamplingSpec& spec,
    Duration step, std::optional<std::span<const Instant>> available) {
  if (events.empty()) throw InvalidArgument("NC sampling needs events");
  std::vector<Instant> pool = nc_candidates(events, spec.type, step, available);
  if (pool.size() < spec.count) {
    throw InsufficientCandidatesError(pool.size(), spec.count);
  }
  Rng rng(spec.seed);
  rng.partial_shuffle(pool, spec.count);
  pool.resize(spec.count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// ---- Sequences ---------------------------------------------------------------

SequenceSpec::SequenceSpec(Duration interval, Duration span, int length)
    : interval_(interval), length_(length) {
  if (interval <= Duration::zero()) {
    throw InvalidArgument("sequence interval must be positive");
  }
  if (length < 1) throw InvalidArgument("sequence length must be >= 1");
  if (interval.count() % 6 != 0) {
    throw InvalidArgument("sequence interval must be a multiple of 6 s");
  }
  if (span != interval * (length - 1)) {
    throw InvalidArgument("sequence span must equal interval * (length - 1)");
  }
}

std::vector<Instant> build_sequence(std::span<const Instant> available,
                                    Instant now, const SequenceSpec& spec) {
  std::vector<Instant> out;
  out.reserve(static_cast<std::size_t>(spec.length()));
  const Duration buffer = spec.buffer();
  for (int k = spec.length() - 1; k >= 0; --k) {
    const Instant target = now - spec.interval() * k;
    auto it = std::lower_bound(available.begin(), available.end(),
                               target - buffer);
    std::optional<Instant> best;
    Duration best_gap{};
    for (; it != available.end() && *it <= target + buffer; ++it) {
      const Duration gap = *it < target ? target - *it : *it - target;
      if (!best || gap < best_gap) {
        best = *it;
        best_gap = gap;
      }
    }
    if (!best || (!out.empty() && *best <= out.back())) throw GapError(target);
    out.push_back(*best);
  }
  return out;
}

// ---- Splits ------------------------------------------------------------------

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw FormatError("unknown split '" + std::string(name) + "'");
}

std::vector<Split> stratified_split(std::span<const int> strata,
                                    std::span<const double> ratios,
                                    std::uint64_t seed) {
  if (ratios.size() < 2 || ratios.size() > 3) {
    throw InvalidArgument("split ratios need 2 or 3 entries");
  }
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw InvalidArgument("split ratios must be >= 0");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must sum to 1");
  }

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

  std::vector<Split> out(strata.size(), Split::kTrain);
  Rng rng(seed);
  for (auto& [stratum, members] : groups) {
    const std::size_t n = members.size();
    // Largest-remainder apportionment; remainder ties favour earlier splits.
    std::vector<std::size_t> quota(ratios.size());
    std::vector<std::pair<double, std::size_t>> frac;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      const double exact = static_cast<double>(n) * ratios[k];
      quota[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      assigned += quota[k];
      frac.emplace_back(exact - static_cast<double>(quota[k]), k);
    }
    std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;
    });
    for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
      ++quota[frac[r % frac.size()].second];
    }

    rng.shuffle(members);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      for (std::size_t c = 0; c < quota[k]; ++c) {
        out[members[pos++]] = static_cast<Split>(k);
      }
    }
  }
  return out;
}

// ---- Manifest ----------------------------------------------------------------

std::string_view entry_kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::kCyclonic:
      return "cyclonic";
    case EntryKind::kNcTypeI:
      return "NC-I";
    case EntryKind::kNcTypeII:
      return "NC-II";
  }
  return "cyclonic";
}

EntryKind parse_entry_kind(std::string_view name) {
  if (name == "cyclonic") return EntryKind::kCyclonic;
  if (name == "NC-I") return EntryKind::kNcTypeI;
  if (name == "NC-II") return EntryKind::kNcTypeII;
  throw FormatError("unknown entry kind '" + std::string(name) + "'");
}

void DatasetManifest::validate() const {
  std::set<std::pair<std::string, int>> seen;
  for (const ManifestEntry& e : entries) {
    if (e.error) continue;
    const int basin = e.basin ? static_cast<int>(*e.basin) : -1;
    if (!seen.emplace(e.image, basin).second) {
      throw FormatError("duplicate manifest image '" + e.image + "'");
    }
  }
}

std::string manifest_entry_to_json(const ManifestEntry& e) {
  nlohmann::ordered_json j;
  j["image"] = e.image;
  j["label"] = e.label ? nlohmann::ordered_json(*e.label) : nullptr;
  j["split"] = split_name(e.split);
  j["event_id"] = e.event_id;
  j["timestamp"] = format_iso8601(e.timestamp);
  j["kind"] = entry_kind_name(e.kind);
  if (e.basin) j["basin"] = basin_name(*e.basin);
  if (e.wind_kt) j["wind_kt"] = *e.wind_kt;
  if (e.intensity) j["class"] = class_name(*e.intensity);
  if (e.padded) j["padded"] = true;
  if (e.landfall) j["landfall"] = true;
  if (e.error) j["error"] = *e.error;
  return j.dump();
}

ManifestEntry manifest_entry_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    ManifestEntry e;
    e.image = j.at("image").get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) {
      e.label = j["label"].get<std::string>();
    }
    e.split = parse_split(j.at("split").get<std::string>());
    e.event_id = j.at("event_id").get<std::string>();
    e.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
    e.kind = parse_entry_kind(j.at("kind").get<std::string>());
    if (j.contains("basin")) e.basin = parse_basin(j["basin"].get<std::string>());
    if (j.contains("wind_kt")) e.wind_kt = j["wind_kt"].get<double>();
    if (j.contains("class")) e.intensity = parse_class(j["class"].get<std::string>());
    e.padded = j.value("padded", false);
    e.landfall = j.value("landfall", false);
    if (j.contains("error")) e.error = j["error"].get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad manifest line: ") + ex.what());
  }
}

void write_manifest(const DatasetManifest& m,
                    const std::filesystem::path& path) {
  m.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const ManifestEntry& e : m.entries) {
    out << manifest_entry_to_json(e) << "\n";
  }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  DatasetManifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    m.entries.push_back(manifest_entry_from_json(line));
  }
  m.validate();
  return m;
}

// ---- Granule sources ---------------------------------------------------------

DirectoryGranuleSource::DirectoryGranuleSource(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("granule directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".btg") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const Instant t = read_granule_timestamp(p);
    if (!files_.emplace(t, p).second) {
      throw FormatError("two granules share timestamp " + format_iso8601(t));
    }
  }
}

std::vector<Instant> DirectoryGranuleSource::timestamps() const {
  std::vector<Instant> out;
  out.reserve(files_.size());
  for (const auto& kv : files_) out.push_back(kv.first);
  return out;
}

Granule DirectoryGranuleSource::load(Instant t) const {
  const auto it = files_.find(t);
  if (it == files_.end()) {
    throw FormatError("no granule at " + format_iso8601(t));
  }
  return read_granule(it->second);
}

std::string DirectoryGranuleSource::locator(Instant t) const {
  const auto it = files_.find(t);
  return it == files_.end() ? std::string() : it->second.string();
}

void InMemoryGranuleSource::add(Granule g) {
  const Instant t = g.timestamp;
  granules_.insert_or_assign(t, std::move(g));
}

std::vector<Instant> InMemoryGranuleSource::timestamps() const {
  std::vector<Instant> out;
  for (const auto& kv : granules_) out.push_back(kv.first);
  return out;
}

Granule InMemoryGranuleSource::load(Instant t) const {
  const auto it = granules_.find(t);
  if (it == granules_.end()) {
    throw FormatError("no granule at " + format_iso8601(t));
  }
  return it->second;
}

std::string InMemoryGranuleSource::locator(Instant t) const {
  return "memory:" + format_compact(t);
}

// ---- Dataset builders --------------------------------------------------------

IntensityDataset build_intensity_dataset(std::span<const BestTrack> events,
                                         const GranuleSource& source,
                                         const IntensityDatasetSpec& spec) {
  if (spec.crop_size < 1) throw InvalidArgument("crop size must be >= 1");
  if (spec.image_dir) std::filesystem::create_directories(*spec.image_dir);
  IntensityDataset out;
  const std::vector<Instant> stamps = source.timestamps();
  for (const BestTrack& event : events) {
    const auto split_it = spec.event_split.find(event.event_id());
    const Split split =
        split_it == spec.event_split.end() ? Split::kTrain : split_it->second;
    for (Instant t : stamps) {
      if (!event.active_at(t)) continue;
      const InterpFix fix = interpolate_track(event, t);
      if (split == Split::kTest && spec.exclude_landfall_in_test &&
          fix.landfall) {
        continue;
      }
      ManifestEntry e;
      const std::string name = event.event_id() + "_" + format_compact(t) + ".pgm";
      e.image = spec.image_dir ? (*spec.image_dir / name).string() : name;
      e.split = split;
      e.event_id = event.event_id();
      e.timestamp = t;
      e.kind = EntryKind::kCyclonic;
      e.basin = event.basin();
      e.wind_kt = fix.wind_kt;
      e.intensity = fix.intensity;
      e.landfall = fix.landfall;
      GrayImage crop;
      try {
        const GrayImage basin_img = extract_basin(source.load(t), event.basin());
        Crop c = crop_centered(basin_img, fix.position, spec.crop_size);
        e.padded = c.padded;
        crop = std::move(c.image);
        if (spec.image_dir) write_pgm(crop.pixels, e.image);
      } catch (const CoverageError& ex) {
        e.error = ex.what();
      } catch (const OutOfGridError& ex) {
        e.error = ex.what();
      }
      out.manifest.entries.push_back(std::move(e));
      out.crops.push_back(std::move(crop));
    }
  }
  out.manifest.validate();
  return out;
}

namespace {

std::string EntryBaseName(Basin basin, Instant t) {
  return std::string(basin_name(basin)) + "_" + format_compact(t);
}

}  // namespace

DetectionDataset build_detection_dataset(std::span<const BestTrack> events,
                                         const GranuleSource& source,
                                         const DetectionDatasetSpec& spec) {
  if (spec.image_dir) std::filesystem::create_directories(*spec.image_dir);
  if (spec.label_dir) std::filesystem::create_directories(*spec.label_dir);
  DetectionDataset out;
  std::vector<int> strata;
  const std::vector<Instant> stamps = source.timestamps();

  auto emit = [&](ManifestEntry e, Basin basin, Instant t,
                  const std::vector<DetectionLabel>& labels,
                  const std::optional<Granule>& granule) {
    const std::string base = EntryBaseName(basin, t);
    if (spec.image_dir && granule) {
      const auto path = *spec.image_dir / (base + ".pgm");
      write_pgm(extract_basin(*granule, basin).pixels, path);
      e.image = path.string();
    } else {
      e.image = source.locator(t);
    }
    if (spec.label_dir && e.kind == EntryKind::kCyclonic) {
      const auto path = *spec.label_dir / (base + ".txt");
      write_label_file(labels, path);
      e.label = path.string();
    }
    e.basin = basin;
    e.timestamp = t;
    out.manifest.entries.push_back(std::move(e));
    out.labels.push_back(labels);
  };

  for (Instant t : stamps) {
    std::optional<Granule> granule;
    for (Basin basin : {Basin::kArabianSea, Basin::kBayOfBengal}) {
      std::vector<DetectionLabel> labels;
      std::string ids;
      int strongest = -1;
      const GridSpec grid = basin_grid(basin);
      for (const BestTrack& ev : events) {
        if (ev.basin() != basin || !ev.active_at(t)) continue;
        const InterpFix fix = interpolate_track(ev, t);
        if (!fix.intensity) continue;
        labels.push_back(make_detection_label(grid, fix, spec.boxes));
        strongest = std::max(strongest, class_id(*fix.intensity));
        ids += (ids.empty() ? "" : "+") + ev.event_id();
      }
      if (labels.empty()) continue;
      if (spec.image_dir && !granule) granule = source.load(t);
      ManifestEntry e;
      e.event_id = ids;
      e.kind = EntryKind::kCyclonic;
      e.intensity = class_from_id(strongest);
      emit(std::move(e), basin, t, labels, granule);
      strata.push_back(strongest);
    }
  }

  const std::size_t n_cyclonic = out.manifest.entries.size();
  const std::vector<Split> splits =
      stratified_split(strata, spec.ratios, spec.seed);
  for (std::size_t i = 0; i < n_cyclonic; ++i) {
    out.manifest.entries[i].split = splits[i];
  }

  const std::set<Instant> available(stamps.begin(), stamps.end());
  std::set<std::pair<int, Instant>> seen_nc;
  for (const auto& [basin, t] : spec.nc_samples) {
    if (!available.count(t)) continue;
    if (!seen_nc.emplace(static_cast<int>(basin), t).second) continue;
    std::vector<BestTrack> same_basin;
    for (const BestTrack& ev : events) {
      if (ev.basin() == basin) same_basin.push_back(ev);
    }
    const auto type = nc_type_for(same_basin, t);
    if (!type) continue;
    const auto placement = nc_placement(same_basin, t);
    ManifestEntry e;
    e.kind = *type == NcType::kTypeI ? EntryKind::kNcTypeI : EntryKind::kNcTypeII;
    e.split = Split::kTest;
    e.event_id = same_basin[placement->nearest].event_id();
    std::optional<Granule> granule;
    if (spec.image_dir) granule = source.load(t);
    emit(std::move(e), basin, t, {}, granule);
  }
  out.manifest.validate();
  return out;
}

}  // namespace cyclotrack
