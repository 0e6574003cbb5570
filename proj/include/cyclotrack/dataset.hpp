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
#ifndef CYCLOTRACK_DATASET_HPP_
#define CYCLOTRACK_DATASET_HPP_

// Detection labels, No-Cyclone sampling, sequence assembly, stratified
// splits and the JSON-lines dataset manifest.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyclotrack/besttrack.hpp"
#include "cyclotrack/error.hpp"
#include "cyclotrack/ingest.hpp"
#include "cyclotrack/time.hpp"

namespace cyclotrack {

// ---- Box sizes and labels ----------------------------------------------------

class BoxSizeConfig {
 public:
  // Sides in pixels, indexed by class id. Throws InvalidArgument unless every
  // side lies in [50, 1035].
  explicit BoxSizeConfig(std::array<int, kNumIntensityClasses> sides);

  static BoxSizeConfig uniform300();
  static BoxSizeConfig uniform500();
  // 400 px for D..VSCS, 300 px for ESCS and SuCS.
  static BoxSizeConfig custom();
  // "300", "500" or "custom"; throws ConfigError.
  static BoxSizeConfig preset(std::string_view name);

  int side(IntensityClass c) const {
    return sides_[static_cast<std::size_t>(class_id(c))];
  }
  const std::array<int, kNumIntensityClasses>& sides() const noexcept {
    return sides_;
  }

 private:
  std::array<int, kNumIntensityClasses> sides_;
};

// Box normalised to the basin image: values in [0, 1].
struct DetectionLabel {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

// Centre at the fix position; the box shrinks symmetrically about the centre
// when it would cross the image edge. Throws OutOfGridError when the fix is
// outside the grid and InvalidArgument when the fix is below TC strength.
DetectionLabel make_detection_label(const GridSpec& grid, const InterpFix& fix,
                                    const BoxSizeConfig& cfg);

// Geographic centre encoded by a label on `grid`.
LatLon label_center(const GridSpec& grid, const DetectionLabel& label);

// `class_id cx cy w h`, six decimals, single spaces.
std::string format_label_line(const DetectionLabel& label);
DetectionLabel parse_label_line(std::string_view line);  // throws FormatError
void write_label_file(std::span<const DetectionLabel> labels,
                      const std::filesystem::path& path);
std::vector<DetectionLabel> read_label_file(const std::filesystem::path& path);

// ---- No-Cyclone sampling -----------------------------------------------------

enum class NcType { kTypeI, kTypeII };

// Type I: distance to the nearest event boundary in (0, 48 h].
// Type II: distance in (48 h, 162 h].
inline constexpr Duration kNcTypeIMax = hours{48};
inline constexpr Duration kNcTypeIIMax = hours{162};

struct NCSamplingSpec {
  NcType type = NcType::kTypeI;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct NcPlacement {
  Duration distance;        // to the nearest start/end boundary
  std::size_t nearest = 0;  // index of the event owning that boundary
};

// std::nullopt while `t` lies inside any event window.
std::optional<NcPlacement> nc_placement(std::span<const BestTrack> events,
                                        Instant t);
std::optional<NcType> nc_type_for(std::span<const BestTrack> events,
                                  Instant t);

// Lattice points (multiples of `step` since the epoch) eligible for `type`,
// ascending. When `available` is given, candidates are restricted to it.
std::vector<Instant> nc_candidates(
    std::span<const BestTrack> events, NcType type, Duration step = minutes{30},
    std::optional<std::span<const Instant>> available = std::nullopt);

// Seeded uniform sample without replacement, returned ascending. Throws
// InvalidArgument for empty `events`, InsufficientCandidatesError when the
// lattice is too small.
std::vector<Instant> sample_nc_timestamps(
    std::span<const BestTrack> events, const NCSamplingSpec& spec,
    Duration step = minutes{30},
    std::optional<std::span<const Instant>> available = std::nullopt);

// ---- Sequences ---------------------------------------------------------------

class SequenceSpec {
 public:
  // Throws InvalidArgument unless interval > 0, length >= 1, the interval is
  // a whole multiple of 6 s and span == interval * (length - 1).
  SequenceSpec(Duration interval, Duration span, int length);
  SequenceSpec(Duration interval, int length)
      : SequenceSpec(interval, interval * (length - 1), length) {}

  Duration interval() const noexcept { return interval_; }
  Duration span() const noexcept { return interval_ * (length_ - 1); }
  int length() const noexcept { return length_; }
  // Matching tolerance around each target: interval / 6.
  Duration buffer() const noexcept { return interval_ / 6; }

 private:
  Duration interval_;
  int length_;
};

class GapError : public Error {
 public:
  explicit GapError(Instant target)
      : Error(ErrorKind::kData, "GapError",
              "no frame within the buffer of " + format_iso8601(target)),
        target_(target) {}
  Instant target() const noexcept { return target_; }

 private:
  Instant target_;
};

// Targets now - k*interval for k = length-1 .. 0, each matched to the
// nearest available frame within +-buffer (ties go to the earlier frame).
// `available` must be ascending. Throws GapError for the first target with
// no match.
std::vector<Instant> build_sequence(std::span<const Instant> available,
                                    Instant now, const SequenceSpec& spec);

// ---- Splits ------------------------------------------------------------------

enum class Split { kTrain, kVal, kTest };
std::string_view split_name(Split s);
Split parse_split(std::string_view name);

// `strata[i]` is the stratum (e.g. class id) of entry i. `ratios` has two
// (train/val) or three (train/val/test) entries summing to 1. Per stratum,
// split sizes follow the largest-remainder rounding of n * ratio and members
// are assigned by a seeded shuffle.
std::vector<Split> stratified_split(std::span<const int> strata,
                                    std::span<const double> ratios,
                                    std::uint64_t seed);

// ---- Manifest ----------------------------------------------------------------

enum class EntryKind { kCyclonic, kNcTypeI, kNcTypeII };
std::string_view entry_kind_name(EntryKind k);  // "cyclonic", "NC-I", "NC-II"
EntryKind parse_entry_kind(std::string_view name);

struct ManifestEntry {
  std::string image;
  std::optional<std::string> label;
  Split split = Split::kTrain;
  std::string event_id;
  Instant timestamp;
  EntryKind kind = EntryKind::kCyclonic;
  std::optional<Basin> basin;
  // Intensity datasets: interpolated best-track wind and class.
  std::optional<double> wind_kt;
  std::optional<IntensityClass> intensity;
  bool padded = false;
  bool landfall = false;
  std::optional<std::string> error;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  // Throws FormatError on duplicate image paths among error-free entries.
  void validate() const;
};

std::string manifest_entry_to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(std::string_view line);
void write_manifest(const DatasetManifest& m,
                    const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

// ---- Granule sources ---------------------------------------------------------

class GranuleSource {
 public:
  virtual ~GranuleSource() = default;
  // Ascending, unique.
  virtual std::vector<Instant> timestamps() const = 0;
  virtual Granule load(Instant t) const = 0;
  // Identifier recorded in manifests for the granule at `t`.
  virtual std::string locator(Instant t) const = 0;
};

// Every `*.btg` granule below a directory, keyed by header timestamp.
class DirectoryGranuleSource final : public GranuleSource {
 public:
  explicit DirectoryGranuleSource(const std::filesystem::path& dir);
  std::vector<Instant> timestamps() const override;
  Granule load(Instant t) const override;
  std::string locator(Instant t) const override;

 private:
  std::map<Instant, std::filesystem::path> files_;
};

class InMemoryGranuleSource final : public GranuleSource {
 public:
  void add(Granule g);
  std::vector<Instant> timestamps() const override;
  Granule load(Instant t) const override;
  std::string locator(Instant t) const override;

 private:
  std::map<Instant, Granule> granules_;
};

// ---- Dataset builders --------------------------------------------------------

struct IntensityDatasetSpec {
  int crop_size = 300;
  bool exclude_landfall_in_test = true;
  // Split per event id; events missing here default to train.
  std::map<std::string, Split> event_split;
  // When set, crops are written as PGM files below this directory.
  std::optional<std::filesystem::path> image_dir;
};

struct IntensityDataset {
  DatasetManifest manifest;
  // Parallel to manifest.entries; empty images for failed entries.
  std::vector<GrayImage> crops;
};

// One entry per available granule inside each event window. Per-entry
// coverage failures are recorded in `error` rather than thrown.
IntensityDataset build_intensity_dataset(std::span<const BestTrack> events,
                                         const GranuleSource& source,
                                         const IntensityDatasetSpec& spec);

struct DetectionDatasetSpec {
  BoxSizeConfig boxes = BoxSizeConfig::custom();
  std::vector<double> ratios = {0.85, 0.15};
  std::uint64_t seed = 0;
  // Timestamps (per basin) to include as NC test images.
  std::vector<std::pair<Basin, Instant>> nc_samples;
  // When set, basin images are written as PGM below this directory and
  // labels as text files below `label_dir`.
  std::optional<std::filesystem::path> image_dir;
  std::optional<std::filesystem::path> label_dir;
};

struct DetectionDataset {
  DatasetManifest manifest;
  // Parallel to manifest.entries: ground truth boxes (empty for NC).
  std::vector<std::vector<DetectionLabel>> labels;
};

// One cyclonic entry per (granule, basin) with at least one active event of
// TC strength; every such event contributes a label line. Cyclonic entries
// are split stratified by their strongest class. NC samples go to test.
DetectionDataset build_detection_dataset(std::span<const BestTrack> events,
                                         const GranuleSource& source,
                                         const DetectionDatasetSpec& spec);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_DATASET_HPP_
