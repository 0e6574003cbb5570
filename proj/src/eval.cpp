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
#include "cyclotrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace cyclotrack {

std::string_view outcome_name(MatchOutcome o) {
  switch (o) {
    case MatchOutcome::kTP:
      return "TP";
    case MatchOutcome::kBackgroundFP:
      return "BackgroundFP";
    case MatchOutcome::kDuplicateRemoved:
      return "DuplicateRemoved";
    case MatchOutcome::kFN:
      return "FN";
    case MatchOutcome::kNcFP:
      return "NC_FP";
  }
  return "?";
}

GroundTruth truth_from_label(const DetectionLabel& label, const GridSpec& grid) {
  return {label.class_id, label.cx * grid.cols(), label.cy * grid.rows(),
          label.w * grid.cols(), label.h * grid.rows()};
}

// ---- Matching ----------------------------------------------------------------

namespace {

std::vector<std::size_t> ByConfidence(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  return order;
}

double CenterDistance(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

}  // namespace

std::vector<Detection> suppress_duplicates(std::span<const Detection> dets,
                                           double radius_px) {
  std::vector<Detection> kept;
  for (std::size_t i : ByConfidence(dets)) {
    const Detection& d = dets[i];
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return CenterDistance(d.cx, d.cy, k.cx, k.cy) <= radius_px;
    });
    if (!close) kept.push_back(d);
  }
  return kept;
}

MatchResult match_predictions(std::span<const Detection> dets,
                              std::span<const GroundTruth> truths,
                              const MatchParams& params, bool nc_image) {
  MatchResult out;
  out.detection_outcomes.assign(dets.size(), std::nullopt);
  out.truth_outcomes.assign(truths.size(), MatchOutcome::kFN);
  out.truth_match.assign(truths.size(), -1);
  for (std::size_t i : ByConfidence(dets)) {
    const Detection& d = dets[i];
    if (d.confidence < params.conf_min) continue;
    if (nc_image) {
      out.detection_outcomes[i] = MatchOutcome::kNcFP;
      continue;
    }
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (out.truth_match[t] >= 0) continue;
      const double dist = CenterDistance(d.cx, d.cy, truths[t].cx, truths[t].cy);
      if (best < 0 || dist < best_dist) {
        best = static_cast<int>(t);
        best_dist = dist;
      }
    }
    if (best < 0) {
      out.detection_outcomes[i] = MatchOutcome::kBackgroundFP;
      continue;
    }
    const GroundTruth& g = truths[static_cast<std::size_t>(best)];
    const bool background = std::abs(d.cx - g.cx) > params.background_px &&
                            std::abs(d.cy - g.cy) > params.background_px;
    if (background) {
      out.detection_outcomes[i] = MatchOutcome::kBackgroundFP;
    } else {
      out.detection_outcomes[i] = MatchOutcome::kTP;
      out.truth_outcomes[static_cast<std::size_t>(best)] = MatchOutcome::kTP;
      out.truth_match[static_cast<std::size_t>(best)] = static_cast<int>(i);
    }
  }
  return out;
}

ImageScore score_image(std::span<const Detection> raw,
                       std::span<const GroundTruth> truths,
                       const MatchParams& params, bool nc_image) {
  ImageScore out;
  out.raw.assign(raw.begin(), raw.end());
  out.detection_outcomes.assign(raw.size(), std::nullopt);

  // Same greedy as suppress_duplicates, keeping track of raw indices.
  std::vector<std::size_t> kept;
  for (std::size_t i : ByConfidence(raw)) {
    if (raw[i].confidence < params.conf_min) continue;
    const bool close = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return CenterDistance(raw[i].cx, raw[i].cy, raw[k].cx, raw[k].cy) <=
             params.duplicate_radius_px;
    });
    if (close) {
      out.detection_outcomes[i] = MatchOutcome::kDuplicateRemoved;
    } else {
      kept.push_back(i);
    }
  }
  std::vector<Detection> survivors;
  survivors.reserve(kept.size());
  for (std::size_t k : kept) survivors.push_back(raw[k]);
  const MatchResult m = match_predictions(survivors, truths, params, nc_image);
  for (std::size_t s = 0; s < kept.size(); ++s) {
    out.detection_outcomes[kept[s]] = m.detection_outcomes[s];
  }
  out.truth_outcomes = m.truth_outcomes;
  out.truth_match.resize(m.truth_match.size());
  for (std::size_t t = 0; t < m.truth_match.size(); ++t) {
    out.truth_match[t] =
        m.truth_match[t] < 0
            ? -1
            : static_cast<int>(kept[static_cast<std::size_t>(m.truth_match[t])]);
  }
  return out;
}

void DetectionCounts::add(const ImageScore& score, EntryKind kind) {
  ++images;
  truths += static_cast<long>(score.truth_outcomes.size());
  long image_tp = 0;
  long image_nc = 0;
  for (const auto& o : score.detection_outcomes) {
    if (!o) continue;
    ++detections_considered;
    switch (*o) {
      case MatchOutcome::kTP:
        ++tp;
        ++image_tp;
        break;
      case MatchOutcome::kBackgroundFP:
        ++background_fp;
        break;
      case MatchOutcome::kDuplicateRemoved:
        ++duplicate_removed;
        break;
      case MatchOutcome::kNcFP:
        ++image_nc;
        break;
      case MatchOutcome::kFN:
        break;
    }
  }
  for (MatchOutcome o : score.truth_outcomes) {
    if (o == MatchOutcome::kFN) ++fn;
  }
  if (kind == EntryKind::kNcTypeI) {
    ++nc_images_type1;
    nc_fp_type1 += image_nc;
    nc_fp_images_type1 += image_nc > 0 ? 1 : 0;
  } else if (kind == EntryKind::kNcTypeII) {
    ++nc_images_type2;
    nc_fp_type2 += image_nc;
    nc_fp_images_type2 += image_nc > 0 ? 1 : 0;
  } else {
    ++images_by_tp[static_cast<std::size_t>(std::min<long>(image_tp, 2))];
  }
}

DetectionCounts& DetectionCounts::merge(const DetectionCounts& o) {
  images += o.images;
  truths += o.truths;
  detections_considered += o.detections_considered;
  tp += o.tp;
  background_fp += o.background_fp;
  duplicate_removed += o.duplicate_removed;
  fn += o.fn;
  nc_images_type1 += o.nc_images_type1;
  nc_images_type2 += o.nc_images_type2;
  nc_fp_type1 += o.nc_fp_type1;
  nc_fp_type2 += o.nc_fp_type2;
  nc_fp_images_type1 += o.nc_fp_images_type1;
  nc_fp_images_type2 += o.nc_fp_images_type2;
  for (std::size_t k = 0; k < images_by_tp.size(); ++k) {
    images_by_tp[k] += o.images_by_tp[k];
  }
  return *this;
}

// ---- Position errors ---------------------------------------------------------

double haversine(LatLon a, LatLon b, double radius_km) {
  return haversine_km(a, b, radius_km);
}

namespace {

LatLon ClampedLatLon(const GridSpec& grid, double x, double y) {
  return pixel_to_latlon(grid, {std::clamp(x, 0.0, static_cast<double>(grid.cols())),
                                std::clamp(y, 0.0, static_cast<double>(grid.rows()))});
}

}  // namespace

TruthRecord position_error(const GridSpec& grid, const Detection& det,
                           const GroundTruth& truth) {
  const LatLon p = ClampedLatLon(grid, det.cx, det.cy);
  const LatLon t = ClampedLatLon(grid, truth.cx, truth.cy);
  TruthRecord r;
  r.intensity = class_from_id(truth.class_id);
  r.outcome = MatchOutcome::kTP;
  r.abs_dlat = std::abs(p.lat - t.lat);
  r.abs_dlon = std::abs(p.lon - t.lon);
  r.km = haversine(p, t);
  return r;
}

std::vector<ClasswiseRow> classwise_table(std::span<const TruthRecord> records) {
  std::vector<ClasswiseRow> rows(kNumIntensityClasses + 1);
  for (int k = 0; k < kNumIntensityClasses; ++k) {
    rows[static_cast<std::size_t>(k)].intensity = static_cast<IntensityClass>(k);
  }
  ClasswiseRow& overall = rows.back();
  for (const TruthRecord& r : records) {
    ClasswiseRow& row = rows[static_cast<std::size_t>(class_id(r.intensity))];
    ++row.count;
    ++overall.count;
    if (r.outcome == MatchOutcome::kTP) {
      for (ClasswiseRow* target : {&row, &overall}) {
        ++target->tp;
        target->lat_err += r.abs_dlat;
        target->lon_err += r.abs_dlon;
        target->km_err += r.km;
      }
    } else {
      ++row.fn;
      ++overall.fn;
    }
  }
  for (ClasswiseRow& row : rows) {
    if (row.tp > 0) {
      row.lat_err /= static_cast<double>(row.tp);
      row.lon_err /= static_cast<double>(row.tp);
      row.km_err /= static_cast<double>(row.tp);
    }
    row.fn_share_pct =
        overall.fn > 0 ? 100.0 * static_cast<double>(row.fn) /
                             static_cast<double>(overall.fn)
                       : 0.0;
  }
  return rows;
}

// ---- PR / F1 -----------------------------------------------------------------

PrF1 pr_f1(long tp, long fn, long nc_fp, long nc_total) {
  if (tp < 0 || fn < 0 || nc_fp < 0 || nc_total < 0) {
    throw InvalidArgument("counts must be non-negative");
  }
  PrF1 out;
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp + nc_fp > 0) {
    out.precision = static_cast<double>(tp) / static_cast<double>(tp + nc_fp);
  }
  if (out.recall && out.precision && *out.recall + *out.precision > 0.0) {
    out.f1 = 2.0 * *out.recall * *out.precision / (*out.recall + *out.precision);
  }
  if (nc_total > 0) {
    out.nc_fp_rate = static_cast<double>(nc_fp) / static_cast<double>(nc_total);
  }
  return out;
}

// ---- Average precision -------------------------------------------------------

double box_iou(double ax, double ay, double aw, double ah, double bx, double by,
               double bw, double bh) {
  const double ix = std::min(ax + aw / 2, bx + bw / 2) - std::max(ax - aw / 2, bx - bw / 2);
  const double iy = std::min(ay + ah / 2, by + bh / 2) - std::max(ay - ah / 2, by - bh / 2);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = aw * ah + bw * bh - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

double ApForClass(std::span<const ApImage> images, double iou,
                  std::optional<int> cls) {
  struct Ref {
    std::size_t image;
    std::size_t det;
    double conf;
  };
  std::vector<Ref> refs;
  long npos = 0;
  std::vector<std::vector<bool>> claimed(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    claimed[i].assign(images[i].truths.size(), false);
    for (const GroundTruth& t : images[i].truths) {
      if (!cls || t.class_id == *cls) ++npos;
    }
    for (std::size_t d = 0; d < images[i].detections.size(); ++d) {
      const Detection& det = images[i].detections[d];
      if (!cls || det.class_id == *cls) refs.push_back({i, d, det.confidence});
    }
  }
  if (npos == 0) return 0.0;
  std::stable_sort(refs.begin(), refs.end(),
                   [](const Ref& a, const Ref& b) { return a.conf > b.conf; });

  std::vector<double> precision, recall;
  long tp = 0, fp = 0;
  for (const Ref& r : refs) {
    const ApImage& img = images[r.image];
    const Detection& d = img.detections[r.det];
    int best = -1;
    double best_iou = iou;
    for (std::size_t t = 0; t < img.truths.size(); ++t) {
      const GroundTruth& g = img.truths[t];
      if (claimed[r.image][t] || (cls && g.class_id != *cls)) continue;
      const double v = box_iou(d.cx, d.cy, d.w, d.h, g.cx, g.cy, g.w, g.h);
      if (v >= best_iou) {
        best = static_cast<int>(t);
        best_iou = v;
      }
    }
    if (best >= 0) {
      claimed[r.image][static_cast<std::size_t>(best)] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(npos));
  }
  for (std::size_t k = precision.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < recall.size(); ++k) {
    if (recall[k] > prev_recall) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
  }
  return ap;
}

}  // namespace

double average_precision_at(std::span<const ApImage> images, double iou,
                            bool per_class) {
  if (!per_class) return ApForClass(images, iou, std::nullopt);
  double sum = 0.0;
  int classes = 0;
  for (int c = 0; c < kNumIntensityClasses; ++c) {
    const bool present = std::any_of(images.begin(), images.end(), [c](const ApImage& im) {
      return std::any_of(im.truths.begin(), im.truths.end(),
                         [c](const GroundTruth& g) { return g.class_id == c; });
    });
    if (!present) continue;
    sum += ApForClass(images, iou, c);
    ++classes;
  }
  return classes > 0 ? sum / classes : 0.0;
}

ApResult average_precision(std::span<const ApImage> images, bool per_class) {
  ApResult out;
  for (int k = 0; k < 10; ++k) {
    const double thr = 0.5 + 0.05 * k;
    out.thresholds.push_back(thr);
    out.ap.push_back(average_precision_at(images, thr, per_class));
  }
  out.map50 = out.ap.front();
  out.map50_95 = std::accumulate(out.ap.begin(), out.ap.end(), 0.0) /
                 static_cast<double>(out.ap.size());
  return out;
}

// ---- Intensity ---------------------------------------------------------------

namespace {

struct ErrorAccumulator {
  double sq = 0.0;
  double abs = 0.0;
  long n = 0;
  void add(double delta) {
    sq += delta * delta;
    abs += std::abs(delta);
    ++n;
  }
  ErrorStats stats() const {
    if (n == 0) return {};
    return {std::sqrt(sq / static_cast<double>(n)), abs / static_cast<double>(n), n};
  }
};

}  // namespace

IntensityErrors intensity_errors(const IntensitySeries& pred,
                                 const IntensitySeries& truth) {
  std::map<Instant, double> truth_at;
  for (const IntensitySample& s : truth.samples) truth_at[s.timestamp] = s.wind_kt;
  ErrorAccumulator all;
  std::map<IntensityClass, ErrorAccumulator> by_class;
  IntensityErrors out;
  for (const IntensitySample& p : pred.samples) {
    const auto it = truth_at.find(p.timestamp);
    if (it == truth_at.end()) continue;
    const double delta = p.wind_kt - it->second;
    all.add(delta);
    if (const auto c = classify_intensity(it->second)) {
      by_class[*c].add(delta);
    } else {
      ++out.below_tc;
    }
  }
  if (all.n == 0) {
    throw EmptyOverlapError("prediction and truth series share no timestamps");
  }
  out.overall = all.stats();
  for (const auto& [c, acc] : by_class) out.per_class[c] = acc.stats();
  return out;
}

// ---- Case studies ------------------------------------------------------------

CaseStudyReport case_study(std::span<const TrackPrediction> track_preds,
                           const BestTrack& track,
                           const IntensitySeries& intensity_preds,
                           int smoothing_window) {
  CaseStudyReport report;
  report.event_id = track.event_id();
  std::map<Instant, CaseStudyRow> rows;
  auto row_at = [&](Instant t) -> CaseStudyRow& {
    auto it = rows.find(t);
    if (it == rows.end()) {
      const InterpFix truth = interpolate_track(track, t);
      CaseStudyRow r;
      r.timestamp = t;
      r.best_track = truth.position;
      r.wind_truth = truth.wind_kt;
      it = rows.emplace(t, r).first;
    }
    return it->second;
  };

  double km_sum = 0.0;
  for (const TrackPrediction& p : track_preds) {
    if (!track.active_at(p.timestamp)) continue;
    CaseStudyRow& r = row_at(p.timestamp);
    if (r.track_km) continue;  // first prediction per timestamp wins
    r.predicted = p.position;
    r.track_km = haversine(p.position, r.best_track);
    km_sum += *r.track_km;
    ++report.track_samples;
  }
  if (report.track_samples > 0) {
    report.mean_track_km = km_sum / static_cast<double>(report.track_samples);
  }

  IntensitySeries in_window;
  for (const IntensitySample& s : intensity_preds.samples) {
    if (track.active_at(s.timestamp)) in_window.samples.push_back(s);
  }
  in_window.validate();
  const IntensitySeries smoothed = smooth(in_window, smoothing_window);
  ErrorAccumulator acc;
  for (std::size_t i = 0; i < smoothed.samples.size(); ++i) {
    CaseStudyRow& r = row_at(smoothed.samples[i].timestamp);
    r.wind_raw = in_window.samples[i].wind_kt;
    r.wind_smoothed = smoothed.samples[i].wind_kt;
    acc.add(*r.wind_smoothed - r.wind_truth);
  }
  report.intensity_samples = acc.n;
  if (acc.n > 0) {
    const ErrorStats s = acc.stats();
    report.intensity_rmse = s.rmse;
    report.intensity_mae = s.mae;
  }
  if (report.track_samples == 0 && report.intensity_samples == 0) {
    throw EmptyOverlapError("no predictions inside the window of event " +
                            track.event_id());
  }
  for (auto& kv : rows) report.rows.push_back(kv.second);
  return report;
}

std::string track_geojson(const CaseStudyReport& report, const BestTrack& track) {
  nlohmann::ordered_json predicted = nlohmann::ordered_json::array();
  for (const CaseStudyRow& r : report.rows) {
    if (r.predicted) predicted.push_back({r.predicted->lon, r.predicted->lat});
  }
  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  for (const TrackFix& f : track.fixes()) {
    truth.push_back({f.position.lon, f.position.lat});
  }
  auto feature = [&](const char* name, nlohmann::ordered_json coords) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["properties"] = {{"name", name}, {"event_id", report.event_id}};
    f["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
    return f;
  };
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = {feature("predicted", std::move(predicted)),
                    feature("best_track", std::move(truth))};
  return fc.dump(2);
}

// ---- Reports -----------------------------------------------------------------

namespace {

nlohmann::ordered_json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json PrF1Json(const PrF1& p) {
  return {{"recall", OptionalNumber(p.recall)},
          {"precision", OptionalNumber(p.precision)},
          {"f1", OptionalNumber(p.f1)},
          {"nc_fp_rate", OptionalNumber(p.nc_fp_rate)},
          {"undefined", p.undefined()}};
}

std::string RowName(const ClasswiseRow& r) {
  return r.intensity ? std::string(class_name(*r.intensity)) : "Overall";
}

}  // namespace

std::string classwise_csv(std::span<const ClasswiseRow> rows) {
  std::ostringstream os;
  os << "class,lat_err,lon_err,km_err,fn,fn_share_pct,count\n";
  char buf[160];
  for (const ClasswiseRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%ld,%.3f,%ld", r.lat_err,
                  r.lon_err, r.km_err, r.fn, r.fn_share_pct, r.count);
    os << RowName(r) << "," << buf << "\n";
  }
  return os.str();
}

std::string detection_report_json(const DetectionReport& report) {
  const DetectionCounts& c = report.counts;
  nlohmann::ordered_json j;
  j["params"] = {{"conf_min", report.params.conf_min},
                 {"duplicate_radius_px", report.params.duplicate_radius_px},
                 {"background_px", report.params.background_px},
                 // The background rule needs both axes beyond the threshold,
                 // so single-axis misses count as TP.
                 {"background_rule", "both_axes_exceed"}};
  j["counts"] = {{"images", c.images},
                 {"truths", c.truths},
                 {"detections_considered", c.detections_considered},
                 {"tp", c.tp},
                 {"background_fp", c.background_fp},
                 {"duplicate_removed", c.duplicate_removed},
                 {"fn", c.fn},
                 {"nc_images_type1", c.nc_images_type1},
                 {"nc_images_type2", c.nc_images_type2},
                 {"nc_fp_type1", c.nc_fp_type1},
                 {"nc_fp_type2", c.nc_fp_type2},
                 {"nc_fp_images_type1", c.nc_fp_images_type1},
                 {"nc_fp_images_type2", c.nc_fp_images_type2},
                 {"images_by_tp", c.images_by_tp}};
  j["partition_ok"] =
      c.tp + c.background_fp + c.duplicate_removed + c.nc_fp_type1 +
              c.nc_fp_type2 ==
          c.detections_considered &&
      c.tp + c.fn == c.truths;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ClasswiseRow& r : report.classwise) {
    rows.push_back({{"class", RowName(r)},
                    {"lat_err", r.lat_err},
                    {"lon_err", r.lon_err},
                    {"km_err", r.km_err},
                    {"tp", r.tp},
                    {"fn", r.fn},
                    {"fn_share_pct", r.fn_share_pct},
                    {"count", r.count}});
  }
  j["classwise"] = std::move(rows);
  j["nc_type1"] = PrF1Json(report.type1);
  j["nc_type2"] = PrF1Json(report.type2);
  j["cyclonic_only"] = PrF1Json(report.cyclonic_only);
  j["map50"] = report.ap.map50;
  j["map50_95"] = report.ap.map50_95;
  j["ap_by_threshold"] = report.ap.ap;
  return j.dump(2);
}

std::string case_study_json(const CaseStudyReport& r) {
  nlohmann::ordered_json j;
  j["event_id"] = r.event_id;
  j["mean_track_km"] = OptionalNumber(r.mean_track_km);
  j["intensity_rmse_kt"] = OptionalNumber(r.intensity_rmse);
  j["intensity_mae_kt"] = OptionalNumber(r.intensity_mae);
  j["track_samples"] = r.track_samples;
  j["intensity_samples"] = r.intensity_samples;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const CaseStudyRow& row : r.rows) {
    nlohmann::ordered_json o;
    o["timestamp"] = format_iso8601(row.timestamp);
    o["best_track"] = {row.best_track.lat, row.best_track.lon};
    o["predicted"] = row.predicted
                         ? nlohmann::ordered_json({row.predicted->lat, row.predicted->lon})
                         : nlohmann::ordered_json(nullptr);
    o["track_km"] = OptionalNumber(row.track_km);
    o["wind_truth"] = row.wind_truth;
    o["wind_raw"] = OptionalNumber(row.wind_raw);
    o["wind_smoothed"] = OptionalNumber(row.wind_smoothed);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

std::string intensity_errors_json(const IntensityErrors& e) {
  nlohmann::ordered_json j;
  j["rmse"] = e.overall.rmse;
  j["mae"] = e.overall.mae;
  j["n"] = e.overall.n;
  j["below_tc"] = e.below_tc;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [c, s] : e.per_class) {
    per[std::string(class_name(c))] = {{"rmse", s.rmse}, {"mae", s.mae}, {"n", s.n}};
  }
  j["per_class"] = std::move(per);
  return j.dump(2);
}

}  // namespace cyclotrack
