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
#include "cyclotrack/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cyclotrack/besttrack.hpp"
#include "cyclotrack/dataset.hpp"
#include "cyclotrack/error.hpp"
#include "cyclotrack/eval.hpp"
#include "cyclotrack/hash.hpp"
#include "cyclotrack/infer.hpp"
#include "cyclotrack/ingest.hpp"
#include "cyclotrack/random.hpp"
#include "cyclotrack/synth.hpp"
#include "json.hpp"

namespace cyclotrack {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---- Config ------------------------------------------------------------------

void RunConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (out.empty()) throw ConfigError("out must not be empty");
  BoxSizeConfig::preset(boxes);
  if (nc_type != 1 && nc_type != 2) throw ConfigError("nc-type must be 1 or 2");
  if (nc_count < 0) throw ConfigError("nc count must be >= 0");
  if (interval_min <= 0 || span_min < 0 || length < 1) {
    throw ConfigError("sequence interval, span and length must be positive");
  }
  if (span_min != interval_min * (length - 1)) {
    throw ConfigError("span must equal interval * (length - 1)");
  }
  if (detector != "blob") throw ConfigError("unknown detector backend '" + detector + "'");
  if (intensity_backend.empty()) throw ConfigError("intensity backend must be set");
  if (!(conf > 0.0 && conf <= 1.0)) throw ConfigError("conf must lie in (0, 1]");
  if (!(dup_px > 0.0) || !(bg_px > 0.0)) throw ConfigError("thresholds must be positive");
  if (split != "all") {
    try {
      parse_split(split);
    } catch (const Error&) {
      throw ConfigError("unknown split '" + split + "'");
    }
  }
  if (smoothing_window < 1) throw ConfigError("smoothing window must be >= 1");
  if (events < 1) throw ConfigError("events must be >= 1");
  if (!(hours > 0.0)) throw ConfigError("hours must be positive");
  if (cadence_min <= 0) throw ConfigError("cadence must be positive");
  if (!(pad_hours >= 0.0)) throw ConfigError("pad hours must be >= 0");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise sd must be >= 0");
  if (grid != "nio" && grid != "AS" && grid != "BOB") {
    throw ConfigError("grid must be nio, AS or BOB");
  }
  try {
    parse_iso8601(start);
  } catch (const Error&) {
    throw ConfigError("start is not an ISO-8601 instant: " + start);
  }
  if (peak_wind && !(*peak_wind >= 0.0 && *peak_wind <= 200.0)) {
    throw ConfigError("peak wind must lie in [0, 200] kt");
  }
  if (basin) {
    try {
      parse_basin(*basin);
    } catch (const Error&) {
      throw ConfigError("unknown basin '" + *basin + "'");
    }
  }
}

fs::path RunConfig::granule_path() const { return granule_dir.value_or(out / "granules"); }
fs::path RunConfig::besttrack_path() const {
  return besttrack.value_or(out / "besttrack.csv");
}
fs::path RunConfig::manifest_path() const {
  return manifest.value_or(out / "manifest.jsonl");
}

namespace {

template <typename T>
void Take(const nlohmann::json& obj, const char* key, T& dst, std::set<std::string>& seen) {
  seen.insert(key);
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  dst = obj.at(key).get<T>();
}

template <typename T>
void TakeOpt(const nlohmann::json& obj, const char* key, std::optional<T>& dst,
             std::set<std::string>& seen) {
  seen.insert(key);
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  dst = obj.at(key).get<T>();
}

void RejectUnknown(const nlohmann::json& obj, const std::set<std::string>& seen,
                   const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (!seen.count(k)) throw ConfigError("unknown config key '" + where + k + "'");
  }
}

const nlohmann::json& Section(const nlohmann::json& root, const char* key,
                              std::set<std::string>& seen) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  seen.insert(key);
  if (!root.contains(key)) return kEmpty;
  if (!root.at(key).is_object()) throw ConfigError(std::string(key) + " must be an object");
  return root.at(key);
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  RunConfig c;
  try {
    const auto root = nlohmann::json::parse(text);
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    std::set<std::string> seen;
    Take(root, "schema_version", c.schema_version, seen);
    if (!root.contains("schema_version")) throw ConfigError("config lacks schema_version");
    Take(root, "seed", c.seed, seen);
    std::optional<std::string> p;
    TakeOpt(root, "out", p, seen);
    if (p) c.out = *p;
    p.reset();
    TakeOpt(root, "granule_dir", p, seen);
    if (p) c.granule_dir = *p;
    p.reset();
    TakeOpt(root, "besttrack", p, seen);
    if (p) c.besttrack = *p;
    p.reset();
    TakeOpt(root, "manifest", p, seen);
    if (p) c.manifest = *p;
    Take(root, "boxes", c.boxes, seen);
    Take(root, "detector", c.detector, seen);
    Take(root, "intensity_backend", c.intensity_backend, seen);
    Take(root, "split", c.split, seen);
    TakeOpt(root, "event_id", c.event_id, seen);
    Take(root, "smoothing_window", c.smoothing_window, seen);

    std::set<std::string> s_nc, s_seq, s_thr, s_syn;
    const auto& nc = Section(root, "nc", seen);
    Take(nc, "type", c.nc_type, s_nc);
    Take(nc, "count", c.nc_count, s_nc);
    RejectUnknown(nc, s_nc, "nc.");
    const auto& seq = Section(root, "sequence", seen);
    Take(seq, "interval_min", c.interval_min, s_seq);
    Take(seq, "span_min", c.span_min, s_seq);
    Take(seq, "length", c.length, s_seq);
    RejectUnknown(seq, s_seq, "sequence.");
    const auto& thr = Section(root, "thresholds", seen);
    Take(thr, "conf", c.conf, s_thr);
    Take(thr, "dup_px", c.dup_px, s_thr);
    Take(thr, "bg_px", c.bg_px, s_thr);
    RejectUnknown(thr, s_thr, "thresholds.");
    const auto& syn = Section(root, "synth", seen);
    Take(syn, "events", c.events, s_syn);
    Take(syn, "hours", c.hours, s_syn);
    Take(syn, "cadence_min", c.cadence_min, s_syn);
    Take(syn, "pad_hours", c.pad_hours, s_syn);
    Take(syn, "noise_sd", c.noise_sd, s_syn);
    Take(syn, "grid", c.grid, s_syn);
    Take(syn, "start", c.start, s_syn);
    TakeOpt(syn, "peak_wind", c.peak_wind, s_syn);
    TakeOpt(syn, "basin", c.basin, s_syn);
    RejectUnknown(syn, s_syn, "synth.");
    RejectUnknown(root, seen, "");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  auto opt_path = [](const std::optional<fs::path>& p) {
    return p ? ojson(p->string()) : ojson(nullptr);
  };
  ojson j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["granule_dir"] = opt_path(c.granule_dir);
  j["besttrack"] = opt_path(c.besttrack);
  j["manifest"] = opt_path(c.manifest);
  j["boxes"] = c.boxes;
  j["detector"] = c.detector;
  j["intensity_backend"] = c.intensity_backend;
  j["split"] = c.split;
  j["event_id"] = c.event_id ? ojson(*c.event_id) : ojson(nullptr);
  j["smoothing_window"] = c.smoothing_window;
  j["nc"] = {{"type", c.nc_type}, {"count", c.nc_count}};
  j["sequence"] = {{"interval_min", c.interval_min},
                   {"span_min", c.span_min},
                   {"length", c.length}};
  j["thresholds"] = {{"conf", c.conf}, {"dup_px", c.dup_px}, {"bg_px", c.bg_px}};
  j["synth"] = {{"events", c.events},
                {"hours", c.hours},
                {"cadence_min", c.cadence_min},
                {"pad_hours", c.pad_hours},
                {"noise_sd", c.noise_sd},
                {"grid", c.grid},
                {"start", c.start},
                {"peak_wind", c.peak_wind ? ojson(*c.peak_wind) : ojson(nullptr)},
                {"basin", c.basin ? ojson(*c.basin) : ojson(nullptr)}};
  return j.dump(2);
}

// ---- Shared helpers ----------------------------------------------------------

namespace {

Duration HoursToDuration(double h) {
  return Duration(static_cast<std::int64_t>(std::llround(h * 3600.0)));
}

void RequireFile(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

// Provenance record; everything except `created_utc` is reproducible.
class RunRecord {
 public:
  RunRecord(std::string command, const RunConfig& cfg)
      : command_(std::move(command)), cfg_(cfg) {}

  void input(const fs::path& p) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) inputs_[f.string()] = sha256_file(f);
    } else if (fs::exists(p)) {
      inputs_[p.string()] = sha256_file(p);
    }
  }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write() const {
    const std::string cfg_json = config_to_json(cfg_);
    ojson j;
    j["command"] = command_;
    j["version"] = kVersion;
    j["schema_version"] = cfg_.schema_version;
    j["seed"] = cfg_.seed;
    j["config_sha256"] = sha256_hex(cfg_json);
    j["config"] = ojson::parse(cfg_json);
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["created_utc"] = format_iso8601(
        std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()));
    WriteText(cfg_.out / "run.json", j.dump(2));
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

std::vector<BestTrack> LoadTracks(const RunConfig& cfg) {
  RequireFile(cfg.besttrack_path(), "best-track CSV");
  return read_besttrack_csv(cfg.besttrack_path());
}

DirectoryGranuleSource LoadGranules(const RunConfig& cfg) {
  RequireFile(cfg.granule_path(), "granule directory");
  return DirectoryGranuleSource(cfg.granule_path());
}

GridSpec SynthGrid(const RunConfig& cfg) {
  if (cfg.grid == "nio") return GridSpec(35.0, 0.0, 45.0, 112.2, 350, 672);
  return basin_grid(parse_basin(cfg.grid));
}

std::vector<BestTrack> SameBasin(std::span<const BestTrack> events, Basin b) {
  std::vector<BestTrack> out;
  for (const BestTrack& e : events) {
    if (e.basin() == b) out.push_back(e);
  }
  return out;
}

fs::path NcPath(const RunConfig& cfg, int type) {
  return cfg.out / ("nc_type" + std::to_string(type) + ".jsonl");
}

std::vector<std::pair<Basin, Instant>> ReadNcFile(const fs::path& path) {
  std::vector<std::pair<Basin, Instant>> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(parse_basin(j.at("basin").get<std::string>()),
                       parse_iso8601(j.at("timestamp").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

// Per basin with events: every eligible available frame, or a seeded sample
// of `count` of them.
std::vector<std::pair<Basin, Instant>> SampleNc(std::span<const BestTrack> events,
                                                std::span<const Instant> available,
                                                NcType type, long count,
                                                std::uint64_t seed) {
  std::vector<std::pair<Basin, Instant>> out;
  for (Basin b : {Basin::kArabianSea, Basin::kBayOfBengal}) {
    const std::vector<BestTrack> same = SameBasin(events, b);
    if (same.empty()) continue;
    std::vector<Instant> picks;
    if (count == 0) {
      picks = nc_candidates(same, type, minutes{30}, available);
    } else {
      NCSamplingSpec spec{type, static_cast<std::size_t>(count),
                          seed ^ (static_cast<std::uint64_t>(b) + 1)};
      picks = sample_nc_timestamps(same, spec, minutes{30}, available);
    }
    for (Instant t : picks) out.emplace_back(b, t);
  }
  return out;
}

void WriteNcFile(const fs::path& path, std::span<const std::pair<Basin, Instant>> picks,
                 NcType type) {
  std::ostringstream os;
  for (const auto& [b, t] : picks) {
    ojson j;
    j["basin"] = std::string(basin_name(b));
    j["timestamp"] = format_iso8601(t);
    j["type"] = type == NcType::kTypeI ? "NC-I" : "NC-II";
    os << j.dump() << '\n';
  }
  WriteText(path, os.str());
}

DetectionDataset BuildDetectionDataset(const RunConfig& cfg,
                                       std::span<const BestTrack> events,
                                       const GranuleSource& source, bool sample_missing,
                                       RunRecord& rec) {
  DetectionDatasetSpec spec;
  spec.boxes = BoxSizeConfig::preset(cfg.boxes);
  spec.seed = cfg.seed;
  spec.label_dir = cfg.out / "labels";
  const std::vector<Instant> available = source.timestamps();
  for (int type : {1, 2}) {
    const fs::path p = NcPath(cfg, type);
    if (fs::exists(p)) {
      rec.input(p);
      for (const auto& s : ReadNcFile(p)) spec.nc_samples.push_back(s);
    } else if (sample_missing) {
      const auto picks = SampleNc(events, available,
                                  type == 1 ? NcType::kTypeI : NcType::kTypeII,
                                  cfg.nc_count, cfg.seed + static_cast<std::uint64_t>(type));
      spec.nc_samples.insert(spec.nc_samples.end(), picks.begin(), picks.end());
    }
  }
  return build_detection_dataset(events, source, spec);
}

DatasetManifest LoadOrBuildManifest(const RunConfig& cfg, RunRecord& rec,
                                    std::ostream& log) {
  const fs::path mp = cfg.manifest_path();
  if (fs::exists(mp)) {
    rec.input(mp);
    return read_manifest(mp);
  }
  if (cfg.manifest) throw ConfigError("manifest not found: " + mp.string());
  log << "manifest missing; labelling " << cfg.granule_path().string() << "\n";
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  rec.input(cfg.granule_path());
  DetectionDataset ds = BuildDetectionDataset(cfg, events, source, true, rec);
  write_manifest(ds.manifest, mp);
  rec.output(mp);
  return std::move(ds.manifest);
}

bool InSplit(const RunConfig& cfg, const ManifestEntry& e) {
  return cfg.split == "all" || e.split == parse_split(cfg.split);
}

// Basin image for a detection manifest entry: a PGM path or a granule.
GrayImage LoadBasinImage(const ManifestEntry& e) {
  if (!e.basin) throw FormatError("detection entry " + e.image + " lacks a basin");
  const fs::path p = e.image;
  if (p.extension() == ".pgm") {
    return {basin_grid(*e.basin), read_pgm(p)};
  }
  return extract_basin(read_granule(p), *e.basin);
}

ojson DetectionJson(const Detection& d) {
  return {{"class_id", d.class_id}, {"confidence", d.confidence}, {"cx", d.cx},
          {"cy", d.cy},             {"w", d.w},                   {"h", d.h}};
}

std::unique_ptr<DetectorBackend> MakeDetector(const RunConfig& cfg) {
  if (cfg.detector == "blob") return std::make_unique<BlobDetector>();
  throw ConfigError("unknown detector backend '" + cfg.detector + "'");
}

std::unique_ptr<IntensityBackend> MakeIntensityBackend(const RunConfig& cfg,
                                                       RunRecord& rec, int& crop_size) {
  if (cfg.intensity_backend == "coldcore") {
    crop_size = 300;
    return std::make_unique<ColdCoreIntensityBackend>();
  }
  const fs::path p = cfg.intensity_backend;
  RequireFile(p, "weight bundle");
  rec.input(p);
  WeightBundle bundle = read_bundle(p);
  if (bundle.output() != OutputTag::kWindKt) {
    throw ConfigError("bundle " + p.string() + " does not emit wind_kt");
  }
  const Shape& in = bundle.input_shape();
  if (in.size() < 3 || in[in.size() - 2] != in[in.size() - 1]) {
    throw ConfigError("bundle input must end in square [1,H,W] frames");
  }
  crop_size = in.back();
  return std::make_unique<BundleIntensityBackend>(std::move(bundle));
}

// Crop series ending at `now` for `event`, each frame centred on the
// best-track position at its own time (clamped into the track span).
class CropSampler {
 public:
  CropSampler(const GranuleSource& source, int crop_size)
      : source_(source), crop_size_(crop_size) {}

  GrayImage crop(const BestTrack& event, Instant t) {
    const Instant clamped = std::clamp(t, event.start(), event.end());
    const InterpFix fix = interpolate_track(event, clamped);
    return crop_centered(basin_image(event.basin(), t), fix.position, crop_size_).image;
  }

  const GrayImage& basin_image(Basin b, Instant t) {
    const auto key = std::make_pair(static_cast<int>(b), t);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      if (cache_.size() > 64) cache_.erase(cache_.begin());
      it = cache_.emplace(key, extract_basin(source_.load(t), b)).first;
    }
    return it->second;
  }

 private:
  const GranuleSource& source_;
  int crop_size_;
  std::map<std::pair<int, Instant>, GrayImage> cache_;
};

struct IntensityRun {
  std::string event_id;
  IntensitySeries pred;
  IntensitySeries truth;
};

// Merges per-event error stats by their sums.
struct ErrorMerge {
  double sq = 0.0;
  double abs = 0.0;
  long n = 0;
  void add(const ErrorStats& s) {
    sq += s.rmse * s.rmse * static_cast<double>(s.n);
    abs += s.mae * static_cast<double>(s.n);
    n += s.n;
  }
  ojson json() const {
    if (n == 0) return {{"rmse", nullptr}, {"mae", nullptr}, {"n", 0}};
    return {{"rmse", std::sqrt(sq / static_cast<double>(n))},
            {"mae", abs / static_cast<double>(n)},
            {"n", n}};
  }
};

}  // namespace

// ---- Commands ----------------------------------------------------------------

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("synth", cfg);
  const GridSpec grid = SynthGrid(cfg);
  const Instant start = parse_iso8601(cfg.start);
  const Duration duration = HoursToDuration(cfg.hours);
  Rng rng(cfg.seed);
  std::vector<EventScript> scripts;
  for (int i = 0; i < cfg.events; ++i) {
    Basin basin = i % 2 == 0 ? Basin::kArabianSea : Basin::kBayOfBengal;
    if (cfg.basin) basin = parse_basin(*cfg.basin);
    if (cfg.grid != "nio") basin = parse_basin(cfg.grid);
    const double peak = cfg.peak_wind.value_or(rng.uniform(40.0, 140.0));
    char id[16];
    std::snprintf(id, sizeof(id), "SYN%02d", i + 1);
    const Instant genesis = start + HoursToDuration(cfg.hours / 2.0 * i);
    scripts.push_back(random_script(id, basin, genesis, duration, peak, rng.next()));
  }
  RenderOptions ro;
  ro.cadence = minutes{cfg.cadence_min};
  ro.pad = HoursToDuration(cfg.pad_hours);
  ro.noise_sd_k = cfg.noise_sd;
  ro.seed = cfg.seed;
  const SyntheticCorpus corpus = render_events(scripts, grid, ro);

  const fs::path gdir = cfg.granule_path();
  fs::create_directories(gdir);
  for (const Granule& g : corpus.frames) {
    write_granule(g, gdir / (format_compact(g.timestamp) + ".btg"));
  }
  write_besttrack_csv(corpus.tracks, cfg.besttrack_path());
  write_truth_jsonl(corpus.truth, cfg.out / "truth.jsonl");
  rec.output(gdir);
  rec.output(cfg.besttrack_path());
  rec.output(cfg.out / "truth.jsonl");
  rec.write();
  log << "synth: " << corpus.frames.size() << " frames, " << corpus.tracks.size()
      << " events -> " << cfg.out.string() << "\n";
}

void cmd_extract(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("extract", cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.granule_path());
  const fs::path dir = cfg.out / "basins";
  fs::create_directories(dir);
  long n = 0;
  for (Instant t : source.timestamps()) {
    const Granule g = source.load(t);
    for (Basin b : {Basin::kArabianSea, Basin::kBayOfBengal}) {
      const GrayImage img = extract_basin(g, b);
      write_pgm(img.pixels, dir / (std::string(basin_name(b)) + "_" + format_compact(t) + ".pgm"));
      ++n;
    }
  }
  rec.output(dir);
  rec.write();
  log << "extract: " << n << " basin images -> " << dir.string() << "\n";
}

void cmd_sample_nc(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("sample-nc", cfg);
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  const NcType type = cfg.nc_type == 1 ? NcType::kTypeI : NcType::kTypeII;
  const std::vector<Instant> available = source.timestamps();
  const auto picks = SampleNc(events, available, type, cfg.nc_count,
                              cfg.seed + static_cast<std::uint64_t>(cfg.nc_type));
  const fs::path p = NcPath(cfg, cfg.nc_type);
  WriteNcFile(p, picks, type);
  rec.output(p);
  rec.write();
  log << "sample-nc: " << picks.size() << " type " << cfg.nc_type << " frames -> "
      << p.string() << "\n";
}

void cmd_label(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("label", cfg);
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  rec.input(cfg.granule_path());
  const DetectionDataset ds = BuildDetectionDataset(cfg, events, source, false, rec);
  const fs::path mp = cfg.manifest_path();
  write_manifest(ds.manifest, mp);
  rec.output(mp);
  rec.output(cfg.out / "labels");
  rec.write();
  log << "label: " << ds.manifest.entries.size() << " entries -> " << mp.string() << "\n";
}

void cmd_sequences(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("sequences", cfg);
  const SequenceSpec spec(minutes{cfg.interval_min}, minutes{cfg.span_min}, cfg.length);
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  const std::vector<Instant> available = source.timestamps();
  std::ostringstream os;
  long ok = 0, gaps = 0;
  for (const BestTrack& ev : events) {
    for (Instant t : available) {
      if (!ev.active_at(t)) continue;
      ojson j;
      j["event_id"] = ev.event_id();
      j["timestamp"] = format_iso8601(t);
      try {
        const auto frames = build_sequence(available, t, spec);
        ojson fr = ojson::array();
        for (Instant f : frames) fr.push_back(format_iso8601(f));
        j["frames"] = std::move(fr);
        ++ok;
      } catch (const GapError& e) {
        j["frames"] = nullptr;
        j["error"] = e.name();
        j["gap_target"] = format_iso8601(e.target());
        ++gaps;
      }
      os << j.dump() << '\n';
    }
  }
  const fs::path p = cfg.out / "sequences.jsonl";
  WriteText(p, os.str());
  rec.output(p);
  rec.write();
  log << "sequences: " << ok << " complete, " << gaps << " with gaps -> " << p.string()
      << "\n";
}

void cmd_detect(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("detect", cfg);
  const DatasetManifest m = LoadOrBuildManifest(cfg, rec, log);
  const auto detector = MakeDetector(cfg);
  std::ostringstream os;
  long n = 0;
  for (const ManifestEntry& e : m.entries) {
    if (e.error || !InSplit(cfg, e)) continue;
    const std::vector<Detection> dets = detector->detect(LoadBasinImage(e));
    ojson arr = ojson::array();
    for (const Detection& d : dets) arr.push_back(DetectionJson(d));
    ojson j;
    j["image"] = e.image;
    j["basin"] = std::string(basin_name(*e.basin));
    j["timestamp"] = format_iso8601(e.timestamp);
    j["detections"] = std::move(arr);
    os << j.dump() << '\n';
    ++n;
  }
  const fs::path p = cfg.out / "detections.jsonl";
  WriteText(p, os.str());
  rec.output(p);
  rec.write();
  log << "detect: " << n << " images -> " << p.string() << "\n";
}

void cmd_eval_detect(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("eval-detect", cfg);
  const DatasetManifest m = LoadOrBuildManifest(cfg, rec, log);
  const auto detector = MakeDetector(cfg);
  DetectionReport report;
  report.params = {cfg.conf, cfg.dup_px, cfg.bg_px};
  std::vector<TruthRecord> records;
  std::vector<ApImage> ap_images;
  std::ostringstream outcomes;
  for (const ManifestEntry& e : m.entries) {
    if (e.error || !InSplit(cfg, e)) continue;
    const GrayImage img = LoadBasinImage(e);
    const std::vector<Detection> raw = detector->detect(img);
    std::vector<GroundTruth> truths;
    const bool nc = e.kind != EntryKind::kCyclonic;
    if (!nc) {
      if (!e.label) throw FormatError("cyclonic entry " + e.image + " has no label file");
      for (const DetectionLabel& l : read_label_file(*e.label)) {
        truths.push_back(truth_from_label(l, img.grid));
      }
    }
    const ImageScore score = score_image(raw, truths, report.params, nc);
    report.counts.add(score, e.kind);

    ApImage ap;
    ap.truths = truths;
    ojson det_out = ojson::array();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto& o = score.detection_outcomes[i];
      if (!o) continue;
      if (*o != MatchOutcome::kDuplicateRemoved) ap.detections.push_back(raw[i]);
      ojson d = DetectionJson(raw[i]);
      d["outcome"] = std::string(outcome_name(*o));
      det_out.push_back(std::move(d));
    }
    ap_images.push_back(std::move(ap));
    for (std::size_t t = 0; t < truths.size(); ++t) {
      TruthRecord r;
      if (score.truth_match[t] >= 0) {
        r = position_error(img.grid, raw[static_cast<std::size_t>(score.truth_match[t])],
                           truths[t]);
      } else {
        r.intensity = class_from_id(truths[t].class_id);
        r.outcome = MatchOutcome::kFN;
      }
      records.push_back(r);
    }
    ojson j;
    j["image"] = e.image;
    j["basin"] = std::string(basin_name(*e.basin));
    j["timestamp"] = format_iso8601(e.timestamp);
    j["kind"] = std::string(entry_kind_name(e.kind));
    j["detections"] = std::move(det_out);
    ojson tr = ojson::array();
    for (MatchOutcome o : score.truth_outcomes) tr.push_back(std::string(outcome_name(o)));
    j["truths"] = std::move(tr);
    outcomes << j.dump() << '\n';
  }
  const DetectionCounts& c = report.counts;
  report.classwise = classwise_table(records);
  report.type1 = pr_f1(c.tp, c.fn, c.nc_fp_images_type1, c.nc_images_type1);
  report.type2 = pr_f1(c.tp, c.fn, c.nc_fp_images_type2, c.nc_images_type2);
  report.cyclonic_only = pr_f1(c.tp, c.fn, c.background_fp, 0);
  report.ap = average_precision(ap_images, false);

  const fs::path json_path = cfg.out / "report.json";
  const fs::path csv_path = cfg.out / "report.csv";
  const fs::path outcomes_path = cfg.out / "outcomes.jsonl";
  WriteText(json_path, detection_report_json(report));
  WriteText(csv_path, classwise_csv(report.classwise));
  WriteText(outcomes_path, outcomes.str());
  rec.output(json_path);
  rec.output(csv_path);
  rec.output(outcomes_path);
  rec.write();
  log << "eval-detect: " << c.images << " images, TP " << c.tp << ", FN " << c.fn
      << ", background FP " << c.background_fp << " -> " << json_path.string() << "\n";
}

void cmd_eval_intensity(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("eval-intensity", cfg);
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  rec.input(cfg.granule_path());
  int crop_size = 300;
  const auto backend = MakeIntensityBackend(cfg, rec, crop_size);
  const int frames = backend->sequence_length();

  IntensityDatasetSpec spec;
  spec.crop_size = crop_size;
  const IntensityDataset ds = build_intensity_dataset(events, source, spec);
  const std::vector<Instant> available = source.timestamps();
  std::map<std::string, const BestTrack*> by_id;
  for (const BestTrack& ev : events) by_id[ev.event_id()] = &ev;

  CropSampler sampler(source, crop_size);
  std::map<std::string, IntensityRun> runs;
  std::ostringstream preds;
  long skipped = 0;
  for (std::size_t i = 0; i < ds.manifest.entries.size(); ++i) {
    const ManifestEntry& e = ds.manifest.entries[i];
    ojson j;
    j["event_id"] = e.event_id;
    j["timestamp"] = format_iso8601(e.timestamp);
    j["wind_truth"] = *e.wind_kt;
    if (e.error) {
      j["wind_pred"] = nullptr;
      j["error"] = *e.error;
      preds << j.dump() << '\n';
      ++skipped;
      continue;
    }
    std::vector<GrayImage> crops;
    if (frames == 1) {
      crops.push_back(ds.crops[i]);
    } else {
      const SequenceSpec seq(minutes{cfg.interval_min}, frames);
      try {
        for (Instant f : build_sequence(available, e.timestamp, seq)) {
          crops.push_back(sampler.crop(*by_id.at(e.event_id), f));
        }
      } catch (const GapError& gap) {
        j["wind_pred"] = nullptr;
        j["error"] = gap.name();
        preds << j.dump() << '\n';
        ++skipped;
        continue;
      }
    }
    const double w = backend->estimate(crops);
    j["wind_pred"] = w;
    preds << j.dump() << '\n';
    IntensityRun& run = runs[e.event_id];
    run.event_id = e.event_id;
    run.pred.samples.push_back({e.timestamp, w});
    run.truth.samples.push_back({e.timestamp, *e.wind_kt});
  }
  if (runs.empty()) throw EmptyOverlapError("no intensity predictions were produced");

  ErrorMerge raw_all, smooth_all;
  std::map<IntensityClass, ErrorMerge> raw_cls;
  ojson per_event = ojson::object();
  for (const auto& [id, run] : runs) {
    const IntensityErrors raw = intensity_errors(run.pred, run.truth);
    const IntensityErrors sm =
        intensity_errors(smooth(run.pred, cfg.smoothing_window), run.truth);
    raw_all.add(raw.overall);
    smooth_all.add(sm.overall);
    for (const auto& [k, s] : raw.per_class) raw_cls[k].add(s);
    per_event[id] = {{"raw", ojson::parse(intensity_errors_json(raw))},
                     {"smoothed", ojson::parse(intensity_errors_json(sm))}};
  }
  ojson j;
  j["backend"] = cfg.intensity_backend;
  j["sequence_length"] = frames;
  j["smoothing_window"] = cfg.smoothing_window;
  j["raw"] = raw_all.json();
  j["smoothed"] = smooth_all.json();
  ojson cls = ojson::object();
  for (const auto& [k, s] : raw_cls) cls[std::string(class_name(k))] = s.json();
  j["raw_per_class"] = std::move(cls);
  j["skipped"] = skipped;
  j["per_event"] = std::move(per_event);

  const fs::path rp = cfg.out / "intensity_report.json";
  const fs::path pp = cfg.out / "intensity_predictions.jsonl";
  WriteText(rp, j.dump(2));
  WriteText(pp, preds.str());
  rec.output(rp);
  rec.output(pp);
  rec.write();
  log << "eval-intensity: " << raw_all.n << " samples -> " << rp.string() << "\n";
}

void cmd_case_study(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunRecord rec("case-study", cfg);
  const auto events = LoadTracks(cfg);
  const auto source = LoadGranules(cfg);
  rec.input(cfg.besttrack_path());
  rec.input(cfg.granule_path());
  if (events.empty()) throw FormatError("best-track CSV has no events");
  const BestTrack* track = &events.front();
  if (cfg.event_id) {
    const auto it = std::find_if(events.begin(), events.end(), [&](const BestTrack& b) {
      return b.event_id() == *cfg.event_id;
    });
    if (it == events.end()) throw ConfigError("unknown event id '" + *cfg.event_id + "'");
    track = &*it;
  }
  const auto detector = MakeDetector(cfg);
  int crop_size = 300;
  const auto backend = MakeIntensityBackend(cfg, rec, crop_size);
  const int frames = backend->sequence_length();
  const std::vector<Instant> available = source.timestamps();
  CropSampler sampler(source, crop_size);
  const MatchParams params{cfg.conf, cfg.dup_px, cfg.bg_px};

  std::vector<TrackPrediction> track_preds;
  IntensitySeries intensity;
  // Association: nearest detection to the previous fix, seeded at genesis.
  LatLon last = track->fixes().front().position;
  for (Instant t : available) {
    if (!track->active_at(t)) continue;
    const GrayImage& img = sampler.basin_image(track->basin(), t);
    std::vector<Detection> dets;
    for (const Detection& d : detector->detect(img)) {
      if (d.confidence >= params.conf_min) dets.push_back(d);
    }
    dets = suppress_duplicates(dets, params.duplicate_radius_px);
    std::optional<LatLon> best;
    double best_km = 0.0;
    for (const Detection& d : dets) {
      const LatLon p = pixel_to_latlon(img.grid, {std::clamp(d.cx, 0.0, 1.0 * img.grid.cols()),
                                                  std::clamp(d.cy, 0.0, 1.0 * img.grid.rows())});
      const double km = haversine(p, last);
      if (!best || km < best_km) {
        best = p;
        best_km = km;
      }
    }
    if (best) {
      track_preds.push_back({t, *best});
      last = *best;
    }
    std::vector<GrayImage> crops;
    try {
      if (frames == 1) {
        crops.push_back(sampler.crop(*track, t));
      } else {
        for (Instant f : build_sequence(available, t, SequenceSpec(minutes{cfg.interval_min}, frames))) {
          crops.push_back(sampler.crop(*track, f));
        }
      }
    } catch (const GapError&) {
      continue;
    }
    intensity.samples.push_back({t, backend->estimate(crops)});
  }
  const CaseStudyReport report =
      case_study(track_preds, *track, intensity, cfg.smoothing_window);

  std::ostringstream csv;
  csv << "timestamp,pred_lat,pred_lon,bt_lat,bt_lon,track_km,wind_raw,wind_smoothed,wind_truth\n";
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char b[32];
    std::snprintf(b, sizeof(b), "%.6f", *v);
    return std::string(b);
  };
  for (const CaseStudyRow& r : report.rows) {
    csv << format_iso8601(r.timestamp) << ","
        << num(r.predicted ? std::optional<double>(r.predicted->lat) : std::nullopt) << ","
        << num(r.predicted ? std::optional<double>(r.predicted->lon) : std::nullopt) << ","
        << num(r.best_track.lat) << "," << num(r.best_track.lon) << "," << num(r.track_km)
        << "," << num(r.wind_raw) << "," << num(r.wind_smoothed) << "," << num(r.wind_truth)
        << "\n";
  }
  const std::string stem = "case_study_" + track->event_id();
  const fs::path jp = cfg.out / (stem + ".json");
  const fs::path gp = cfg.out / (stem + ".geojson");
  const fs::path cp = cfg.out / (stem + ".csv");
  WriteText(jp, case_study_json(report));
  WriteText(gp, track_geojson(report, *track));
  WriteText(cp, csv.str());
  rec.output(jp);
  rec.output(gp);
  rec.output(cp);
  rec.write();
  log << "case-study " << track->event_id() << ": " << report.track_samples
      << " track fixes, " << report.intensity_samples << " intensity samples -> "
      << jp.string() << "\n";
}

// ---- Entry point -------------------------------------------------------------

namespace {

void WriteErrorJson(std::ostream& err, std::string_view name, std::string_view kind,
                    std::string_view message) {
  ojson j;
  j["error"] = name;
  j["kind"] = kind;
  j["message"] = message;
  err << j.dump() << std::endl;
}

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::string out, granules, besttrack, manifest, backend, boxes, split, event, grid,
      start, basin;
  int nc_type = 1, interval = 0, span = 0, length = 0, events = 0, cadence = 0,
      window = 0;
  long count = 0;
  double conf = 0, dup = 0, bg = 0, hours = 0, pad = 0, noise = 0, peak = 0;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tropical-cyclone detection and intensity pipeline", "cyclotrack"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Overrides o;
  std::map<std::string, CLI::Option*> given;
  using Command = std::function<void(const RunConfig&, std::ostream&)>;
  std::vector<std::pair<CLI::App*, Command>> commands;

  auto add = [&](const char* name, const char* help, Command fn,
                 std::initializer_list<const char*> extra) {
    CLI::App* sub = app.add_subcommand(name, help);
    const std::string prefix = std::string(name) + ":";
    auto opt = [&](const char* flag, auto& var, const char* desc) {
      given[prefix + flag] = sub->add_option(flag, var, desc);
      return given[prefix + flag];
    };
    opt("--config", o.config, "JSON run configuration");
    opt("--seed", o.seed, "seed for every random draw");
    opt("--out", o.out, "output directory");
    opt("--granules", o.granules, "granule directory (default <out>/granules)");
    opt("--besttrack", o.besttrack, "best-track CSV (default <out>/besttrack.csv)");
    for (std::string_view e : extra) {
      if (e == "manifest") opt("--manifest", o.manifest, "dataset manifest (JSON lines)");
      if (e == "backend") opt("--backend", o.backend, "backend: blob, coldcore or a .wb.json path");
      if (e == "boxes") {
        opt("--boxes", o.boxes, "box preset")->check(CLI::IsMember({"300", "500", "custom"}));
      }
      if (e == "nc") {
        opt("--nc-type", o.nc_type, "NC type")->check(CLI::IsMember({1, 2}));
        opt("--count", o.count, "frames per basin, 0 = all eligible");
      }
      if (e == "seq") {
        opt("--interval", o.interval, "sequence interval, minutes");
        opt("--span", o.span, "sequence span, minutes");
        opt("--length", o.length, "frames per sequence");
      }
      if (e == "thr") {
        opt("--conf", o.conf, "confidence threshold");
        opt("--dup-px", o.dup, "duplicate suppression radius, px");
        opt("--bg-px", o.bg, "background FP threshold, px");
        opt("--split", o.split, "all, train, val or test");
      }
      if (e == "event") opt("--event", o.event, "event id");
      if (e == "window") opt("--window", o.window, "smoothing window, samples");
      if (e == "synth") {
        opt("--events", o.events, "number of events");
        opt("--hours", o.hours, "event duration, hours");
        opt("--cadence", o.cadence, "frame cadence, minutes");
        opt("--pad-hours", o.pad, "frames before and after the events, hours");
        opt("--noise", o.noise, "Gaussian noise sd, K");
        opt("--grid", o.grid, "nio, AS or BOB")->check(CLI::IsMember({"nio", "AS", "BOB"}));
        opt("--start", o.start, "first genesis, ISO-8601");
        opt("--peak-wind", o.peak, "peak wind of every event, kt");
        opt("--basin", o.basin, "basin of every event")->check(CLI::IsMember({"AS", "BOB"}));
      }
    }
    commands.emplace_back(sub, std::move(fn));
  };

  add("synth", "render synthetic granules, best tracks and truth", cmd_synth, {"synth"});
  add("extract", "write basin images for every granule", cmd_extract, {});
  add("sample-nc", "sample No-Cyclone frames", cmd_sample_nc, {"nc"});
  add("label", "build the detection manifest and label files", cmd_label,
      {"manifest", "boxes"});
  add("sequences", "assemble frame sequences", cmd_sequences, {"seq"});
  add("detect", "run the detector over the manifest", cmd_detect,
      {"manifest", "backend", "boxes", "thr"});
  add("eval-detect", "score detections against labels", cmd_eval_detect,
      {"manifest", "backend", "boxes", "thr"});
  add("eval-intensity", "score intensity estimates against best tracks",
      cmd_eval_intensity, {"backend", "seq", "window"});
  add("case-study", "track and intensity report for one event", cmd_case_study,
      {"backend", "seq", "thr", "event", "window"});

  std::vector<const char*> argv;
  argv.push_back("cyclotrack");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    WriteErrorJson(err, "UsageError", "config", e.what());
    return kExitConfig;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      const std::string prefix = sub->get_name() + ":";
      auto has = [&](const char* flag) {
        const auto it = given.find(prefix + flag);
        return it != given.end() && it->second->count() > 0;
      };
      RunConfig cfg = has("--config") ? load_config(o.config) : RunConfig{};
      if (has("--seed")) cfg.seed = o.seed;
      if (has("--out")) cfg.out = o.out;
      if (has("--granules")) cfg.granule_dir = fs::path(o.granules);
      if (has("--besttrack")) cfg.besttrack = fs::path(o.besttrack);
      if (has("--manifest")) cfg.manifest = fs::path(o.manifest);
      if (has("--backend")) {
        if (sub->get_name() == "detect" || sub->get_name() == "eval-detect") {
          cfg.detector = o.backend;
        } else {
          cfg.intensity_backend = o.backend;
        }
      }
      if (has("--boxes")) cfg.boxes = o.boxes;
      if (has("--nc-type")) cfg.nc_type = o.nc_type;
      if (has("--count")) cfg.nc_count = o.count;
      if (has("--interval")) cfg.interval_min = o.interval;
      if (has("--length")) cfg.length = o.length;
      if (has("--span")) {
        cfg.span_min = o.span;
      } else if (has("--interval") || has("--length")) {
        cfg.span_min = cfg.interval_min * (cfg.length - 1);
      }
      if (has("--conf")) cfg.conf = o.conf;
      if (has("--dup-px")) cfg.dup_px = o.dup;
      if (has("--bg-px")) cfg.bg_px = o.bg;
      if (has("--split")) cfg.split = o.split;
      if (has("--event")) cfg.event_id = o.event;
      if (has("--window")) cfg.smoothing_window = o.window;
      if (has("--events")) cfg.events = o.events;
      if (has("--hours")) cfg.hours = o.hours;
      if (has("--cadence")) cfg.cadence_min = o.cadence;
      if (has("--pad-hours")) cfg.pad_hours = o.pad;
      if (has("--noise")) cfg.noise_sd = o.noise;
      if (has("--grid")) cfg.grid = o.grid;
      if (has("--start")) cfg.start = o.start;
      if (has("--peak-wind")) cfg.peak_wind = o.peak;
      if (has("--basin")) cfg.basin = o.basin;
      fs::create_directories(cfg.out);
      fn(cfg, out);
      return kExitOk;
    }
    WriteErrorJson(err, "UsageError", "config", "no subcommand");
    return kExitConfig;
  } catch (const Error& e) {
    const char* kind = e.kind() == ErrorKind::kConfig ? "config"
                       : e.kind() == ErrorKind::kData ? "data"
                                                      : "internal";
    WriteErrorJson(err, e.name(), kind, e.what());
    return e.kind() == ErrorKind::kConfig ? kExitConfig
           : e.kind() == ErrorKind::kData ? kExitData
                                          : kExitInternal;
  } catch (const fs::filesystem_error& e) {
    WriteErrorJson(err, "IOError", "data", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    WriteErrorJson(err, "InternalError", "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace cyclotrack
