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
#ifndef CYCLOTRACK_EVAL_HPP_
#define CYCLOTRACK_EVAL_HPP_

// Detection and intensity scoring: duplicate suppression, the TP / FP / FN
// taxonomy, great-circle position errors, class-wise tables, PR/F1 against
// No-Cyclone images, mAP, RMSE/MAE and per-event case studies.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclotrack/besttrack.hpp"
#include "cyclotrack/dataset.hpp"
#include "cyclotrack/geodesy.hpp"
#include "cyclotrack/infer.hpp"

namespace cyclotrack {

// ---- Matching ----------------------------------------------------------------

enum class MatchOutcome { kTP, kBackgroundFP, kDuplicateRemoved, kFN, kNcFP };
std::string_view outcome_name(MatchOutcome o);

// Ground-truth box in basin pixel space.
struct GroundTruth {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

GroundTruth truth_from_label(const DetectionLabel& label, const GridSpec& grid);

struct MatchParams {
  double conf_min = 0.25;
  double duplicate_radius_px = 10.0;
  // A paired detection is a background FP only when BOTH |dx| and |dy|
  // exceed this.
  double background_px = 100.0;
};

// Greedy by descending confidence: drops every detection whose centre lies
// within `radius_px` (Euclidean) of an already kept one.
std::vector<Detection> suppress_duplicates(std::span<const Detection> dets,
                                           double radius_px = 10.0);

struct MatchResult {
  // Parallel to the detections passed in; std::nullopt below conf_min.
  std::vector<std::optional<MatchOutcome>> detection_outcomes;
  // Parallel to truths: kTP or kFN.
  std::vector<MatchOutcome> truth_outcomes;
  // Detection index matched to each truth, -1 when FN.
  std::vector<int> truth_match;
};

// Detections (already duplicate-suppressed) are visited by descending
// confidence and paired with the nearest truth not yet claimed by a TP.
// A pairing failing the background rule yields a BackgroundFP and leaves the
// truth available. On NC images every detection >= conf_min is an NC FP.
MatchResult match_predictions(std::span<const Detection> dets,
                              std::span<const GroundTruth> truths,
                              const MatchParams& params = {},
                              bool nc_image = false);

struct ImageScore {
  std::vector<Detection> raw;
  // Parallel to `raw`: std::nullopt below conf_min, else the outcome
  // (including kDuplicateRemoved).
  std::vector<std::optional<MatchOutcome>> detection_outcomes;
  std::vector<MatchOutcome> truth_outcomes;
  std::vector<int> truth_match;  // index into `raw`
};

// Confidence filter, duplicate suppression, then matching.
ImageScore score_image(std::span<const Detection> raw,
                       std::span<const GroundTruth> truths,
                       const MatchParams& params = {}, bool nc_image = false);

// Associative, commutative tallies of per-image scores.
struct DetectionCounts {
  long images = 0;
  long truths = 0;
  long detections_considered = 0;  // raw detections >= conf_min
  long tp = 0;
  long background_fp = 0;
  long duplicate_removed = 0;
  long fn = 0;
  long nc_images_type1 = 0;
  long nc_images_type2 = 0;
  long nc_fp_type1 = 0;  // detections
  long nc_fp_type2 = 0;
  long nc_fp_images_type1 = 0;  // NC images with >= 1 detection
  long nc_fp_images_type2 = 0;
  // Cyclonic images by number of TPs: index 0, 1, 2+.
  std::array<long, 3> images_by_tp = {0, 0, 0};

  void add(const ImageScore& score, EntryKind kind);
  DetectionCounts& merge(const DetectionCounts& other);
};

// ---- Position errors ---------------------------------------------------------

double haversine(LatLon a, LatLon b, double radius_km = kEarthRadiusKm);

struct TruthRecord {
  IntensityClass intensity = IntensityClass::kD;
  MatchOutcome outcome = MatchOutcome::kFN;
  // Valid for TPs: absolute degree errors and great-circle km error.
  double abs_dlat = 0.0;
  double abs_dlon = 0.0;
  double km = 0.0;
};

// TP record from a matched detection and truth on `grid`.
TruthRecord position_error(const GridSpec& grid, const Detection& det,
                           const GroundTruth& truth);

struct ClasswiseRow {
  std::optional<IntensityClass> intensity;  // std::nullopt for "Overall"
  double lat_err = 0.0;
  double lon_err = 0.0;
  double km_err = 0.0;
  long tp = 0;
  long fn = 0;
  double fn_share_pct = 0.0;  // of all FN
  long count = 0;
};

// One row per class (D..SuCS) followed by the overall row, whose errors are
// the TP-weighted means.
std::vector<ClasswiseRow> classwise_table(std::span<const TruthRecord> records);

// ---- PR / F1 -----------------------------------------------------------------

struct PrF1 {
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> nc_fp_rate;
  // Any of the above undefined because a denominator was zero.
  bool undefined() const {
    return !recall || !precision || !f1 || !nc_fp_rate;
  }
};

// recall = TP/(TP+FN); precision = TP/(TP+NC_FP); F1 harmonic mean;
// nc_fp_rate = NC_FP/nc_total.
PrF1 pr_f1(long tp, long fn, long nc_fp, long nc_total);

// ---- Average precision -------------------------------------------------------

struct ApImage {
  std::vector<Detection> detections;
  std::vector<GroundTruth> truths;
};

double box_iou(double ax, double ay, double aw, double ah, double bx,
               double by, double bw, double bh);

struct ApResult {
  std::vector<double> thresholds;
  std::vector<double> ap;  // parallel to thresholds
  double map50 = 0.0;
  double map50_95 = 0.0;
};

// All-point interpolated AP (precision envelope) per IoU threshold. With
// per_class set, AP is averaged over classes that have truths; otherwise all
// boxes are one class.
ApResult average_precision(std::span<const ApImage> images,
                           bool per_class = false);
double average_precision_at(std::span<const ApImage> images, double iou,
                            bool per_class = false);

// ---- Intensity ---------------------------------------------------------------

struct ErrorStats {
  double rmse = 0.0;
  double mae = 0.0;
  long n = 0;
};

struct IntensityErrors {
  ErrorStats overall;
  std::map<IntensityClass, ErrorStats> per_class;  // by truth class
  long below_tc = 0;  // overlapping samples with truth < 17 kt
};

// Over timestamps present in both series. Throws EmptyOverlapError.
IntensityErrors intensity_errors(const IntensitySeries& pred,
                                 const IntensitySeries& truth);

// ---- Case studies ------------------------------------------------------------

struct TrackPrediction {
  Instant timestamp;
  LatLon position;
};

struct CaseStudyRow {
  Instant timestamp;
  std::optional<LatLon> predicted;
  LatLon best_track;
  std::optional<double> track_km;
  std::optional<double> wind_raw;
  std::optional<double> wind_smoothed;
  double wind_truth = 0.0;
};

struct CaseStudyReport {
  std::string event_id;
  std::optional<double> mean_track_km;
  std::optional<double> intensity_rmse;
  std::optional<double> intensity_mae;
  long track_samples = 0;
  long intensity_samples = 0;
  std::vector<CaseStudyRow> rows;
};

// Predictions outside the best-track span are ignored. Intensity is
// smoothed with a trailing window before scoring. Throws EmptyOverlapError
// when neither series overlaps the track.
CaseStudyReport case_study(std::span<const TrackPrediction> track_preds,
                           const BestTrack& track,
                           const IntensitySeries& intensity_preds,
                           int smoothing_window = 6);

// FeatureCollection with "predicted" and "best_track" LineStrings.
std::string track_geojson(const CaseStudyReport& report, const BestTrack& track);

// ---- Reports -----------------------------------------------------------------

struct DetectionReport {
  MatchParams params;
  DetectionCounts counts;
  std::vector<ClasswiseRow> classwise;
  PrF1 type1;
  PrF1 type2;
  PrF1 cyclonic_only;  // precision over cyclonic detections only
  ApResult ap;
};

// Column order: class,lat_err,lon_err,km_err,fn,fn_share_pct,count
std::string classwise_csv(std::span<const ClasswiseRow> rows);
std::string detection_report_json(const DetectionReport& report);
std::string case_study_json(const CaseStudyReport& report);
std::string intensity_errors_json(const IntensityErrors& errors);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_EVAL_HPP_
