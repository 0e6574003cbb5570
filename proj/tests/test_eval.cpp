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
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cyclotrack/eval.hpp"
#include "cyclotrack/random.hpp"

namespace cyclotrack {
namespace {

Detection Det(double cx, double cy, double conf, double side = 50.0) {
  return {0, conf, cx, cy, side, side};
}

GroundTruth Truth(double cx, double cy, int cls = 2, double side = 50.0) {
  return {cls, cx, cy, side, side};
}

// ---- Duplicate suppression ----

TEST(Suppress, Examples) {
  std::vector<Detection> two = {Det(100, 100, 0.6), Det(105, 100, 0.8)};
  auto kept = suppress_duplicates(two);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.8);

  two[1].cx = 115;
  EXPECT_EQ(suppress_duplicates(two).size(), 2u);

  const std::vector<Detection> three = {Det(0, 0, 0.5), Det(4, 3, 0.9), Det(3, 4, 0.7)};
  kept = suppress_duplicates(three);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.9);
}

// Oracle: the greedy keep-set is the unique subset S such that every member
// is > r from higher-ranked members of S and every non-member is within r of
// a higher-ranked member of S. Checked over all subsets of small inputs.
TEST(Suppress, MatchesExhaustiveKeepSetCharacterisation) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(8));
    std::vector<Detection> d;
    for (int i = 0; i < n; ++i) {
      // Distinct confidences keep the ranking unambiguous.
      d.push_back(Det(rng.uniform(0, 30), rng.uniform(0, 30), 0.1 + 0.1 * i));
    }
    rng.shuffle(d);
    std::vector<int> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(),
              [&](int a, int b) { return d[a].confidence > d[b].confidence; });
    auto near = [&](int a, int b) {
      return std::hypot(d[a].cx - d[b].cx, d[a].cy - d[b].cy) <= 10.0;
    };
    std::vector<std::vector<int>> valid;
    for (int mask = 0; mask < (1 << n); ++mask) {
      bool ok = true;
      for (int p = 0; p < n && ok; ++p) {
        const int i = rank[p];
        bool covered = false;
        for (int q = 0; q < p; ++q) {
          if ((mask >> rank[q] & 1) && near(i, rank[q])) covered = true;
        }
        if ((mask >> i & 1) == covered) ok = false;
      }
      if (!ok) continue;
      std::vector<int> s;
      for (int p = 0; p < n; ++p) {
        if (mask >> rank[p] & 1) s.push_back(rank[p]);
      }
      valid.push_back(s);
    }
    ASSERT_EQ(valid.size(), 1u);
    const auto kept = suppress_duplicates(d);
    ASSERT_EQ(kept.size(), valid[0].size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      EXPECT_EQ(kept[k].confidence, d[valid[0][k]].confidence);
    }
    // Pairwise separation and idempotence.
    for (std::size_t a = 0; a < kept.size(); ++a)
      for (std::size_t b = a + 1; b < kept.size(); ++b)
        EXPECT_GT(std::hypot(kept[a].cx - kept[b].cx, kept[a].cy - kept[b].cy), 10.0);
    EXPECT_EQ(suppress_duplicates(kept).size(), kept.size());
  }
}

// ---- Matching ----

TEST(Match, BackgroundRuleNeedsBothAxes) {
  const std::vector<GroundTruth> t = {Truth(500, 500)};
  auto r = match_predictions(std::vector<Detection>{Det(650, 650, 0.9)}, t);
  EXPECT_EQ(r.detection_outcomes[0], MatchOutcome::kBackgroundFP);
  EXPECT_EQ(r.truth_outcomes[0], MatchOutcome::kFN);
  r = match_predictions(std::vector<Detection>{Det(650, 520, 0.9)}, t);
  EXPECT_EQ(r.detection_outcomes[0], MatchOutcome::kTP);
  EXPECT_EQ(r.truth_outcomes[0], MatchOutcome::kTP);
  EXPECT_EQ(r.truth_match[0], 0);
}

TEST(Match, NcImagesAndConfidenceFloor) {
  const std::vector<Detection> d = {Det(10, 10, 0.3), Det(400, 400, 0.2)};
  const auto r = match_predictions(d, {}, {}, true);
  EXPECT_EQ(r.detection_outcomes[0], MatchOutcome::kNcFP);
  EXPECT_FALSE(r.detection_outcomes[1].has_value());
}

TEST(Match, BackgroundFpLeavesTruthForLaterDetection) {
  const std::vector<GroundTruth> t = {Truth(500, 500)};
  const std::vector<Detection> d = {Det(700, 700, 0.9), Det(510, 490, 0.5)};
  const auto r = match_predictions(d, t);
  EXPECT_EQ(r.detection_outcomes[0], MatchOutcome::kBackgroundFP);
  EXPECT_EQ(r.detection_outcomes[1], MatchOutcome::kTP);
  EXPECT_EQ(r.truth_match[0], 1);
}

TEST(Match, GreedyNearestWithConsumption) {
  const std::vector<GroundTruth> t = {Truth(100, 100), Truth(600, 600)};
  const std::vector<Detection> d = {Det(590, 610, 0.9), Det(110, 95, 0.8), Det(120, 100, 0.7)};
  const auto r = match_predictions(d, t);
  EXPECT_EQ(r.truth_match[1], 0);
  EXPECT_EQ(r.truth_match[0], 1);
  // Both truths claimed: the third has nothing to pair with.
  EXPECT_EQ(r.detection_outcomes[2], MatchOutcome::kBackgroundFP);
}

TEST(ScoreImage, PartitionHoldsOnRandomImages) {
  Rng rng(41);
  DetectionCounts total;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<GroundTruth> t;
    const int nt = static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < nt; ++i) {
      t.push_back(Truth(rng.uniform(0, 1035), rng.uniform(0, 1035), static_cast<int>(rng.uniform_index(7))));
    }
    std::vector<Detection> d;
    const int nd = static_cast<int>(rng.uniform_index(6));
    for (int i = 0; i < nd; ++i) {
      if (nt > 0 && rng.uniform01() < 0.6) {
        const auto& g = t[rng.uniform_index(nt)];
        d.push_back(Det(g.cx + 8.0 * rng.normal(), g.cy + 8.0 * rng.normal(), rng.uniform01()));
      } else {
        d.push_back(Det(rng.uniform(0, 1035), rng.uniform(0, 1035), rng.uniform01()));
      }
    }
    const bool nc = nt == 0 && rng.uniform01() < 0.5;
    const ImageScore s = score_image(d, t, {}, nc);
    long considered = 0, tp = 0, bg = 0, dup = 0, ncfp = 0, fn = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i].confidence < 0.25) {
        EXPECT_FALSE(s.detection_outcomes[i].has_value());
        continue;
      }
      ++considered;
      ASSERT_TRUE(s.detection_outcomes[i].has_value());
      switch (*s.detection_outcomes[i]) {
        case MatchOutcome::kTP: ++tp; break;
        case MatchOutcome::kBackgroundFP: ++bg; break;
        case MatchOutcome::kDuplicateRemoved: ++dup; break;
        case MatchOutcome::kNcFP: ++ncfp; break;
        case MatchOutcome::kFN: ADD_FAILURE(); break;
      }
    }
    for (MatchOutcome o : s.truth_outcomes) fn += o == MatchOutcome::kFN;
    EXPECT_EQ(tp + bg + dup + ncfp, considered);
    EXPECT_EQ(tp + fn, nt);
    if (nc) EXPECT_EQ(tp + bg, 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (s.truth_match[k] >= 0) {
        EXPECT_EQ(s.detection_outcomes[s.truth_match[k]], MatchOutcome::kTP);
      }
    }
    total.add(s, nc ? EntryKind::kNcTypeI : EntryKind::kCyclonic);
  }
  EXPECT_EQ(total.tp + total.fn, total.truths);
  EXPECT_EQ(total.tp + total.background_fp + total.duplicate_removed + total.nc_fp_type1,
            total.detections_considered);
}

TEST(DetectionCounts, MergeIsAssociativeAndCommutative) {
  Rng rng(2);
  auto random_counts = [&] {
    DetectionCounts c;
    for (int i = 0; i < 5; ++i) {
      std::vector<Detection> d = {Det(rng.uniform(0, 300), 100, rng.uniform01())};
      std::vector<GroundTruth> t = {Truth(150, 100)};
      const bool nc = rng.uniform01() < 0.3;
      c.add(score_image(d, nc ? std::vector<GroundTruth>{} : t, {}, nc),
            nc ? EntryKind::kNcTypeII : EntryKind::kCyclonic);
    }
    return c;
  };
  const DetectionCounts a = random_counts(), b = random_counts(), c = random_counts();
  auto as_json = [](const DetectionCounts& x) {
    return std::vector<long>{x.images, x.truths, x.detections_considered, x.tp, x.background_fp,
                             x.duplicate_removed, x.fn, x.nc_images_type2, x.nc_fp_type2,
                             x.nc_fp_images_type2, x.images_by_tp[0], x.images_by_tp[1],
                             x.images_by_tp[2]};
  };
  DetectionCounts ab_c = a;
  ab_c.merge(b).merge(c);
  DetectionCounts bc = b;
  bc.merge(c);
  DetectionCounts a_bc = a;
  a_bc.merge(bc);
  DetectionCounts ba = b;
  ba.merge(a);
  DetectionCounts ab = a;
  ab.merge(b);
  EXPECT_EQ(as_json(ab_c), as_json(a_bc));
  EXPECT_EQ(as_json(ab), as_json(ba));
}

// ---- Position errors and class table ----

TEST(Geodesy, HaversineExamples) {
  EXPECT_NEAR(haversine({0, 0}, {0, 1}), 111.195, 0.01);
  EXPECT_NEAR(haversine({0, 0}, {90, 0}), 10007.5, 0.5);
  EXPECT_EQ(haversine({12, 80}, {12, 80}), 0.0);
}

TEST(Classwise, SingleTpRowAndFnShares) {
  std::vector<TruthRecord> recs;
  recs.push_back({IntensityClass::kCS, MatchOutcome::kTP, 0.1, 0.0, haversine({0, 0}, {0.1, 0})});
  const std::array<long, 7> fn = {112, 20, 17, 10, 17, 0, 0};
  for (int k = 0; k < 7; ++k)
    for (long i = 0; i < fn[k]; ++i) recs.push_back({static_cast<IntensityClass>(k)});
  const auto rows = classwise_table(recs);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_DOUBLE_EQ(rows[2].lat_err, 0.1);
  EXPECT_DOUBLE_EQ(rows[2].lon_err, 0.0);
  EXPECT_NEAR(rows[2].km_err, 11.1195, 1e-3);
  EXPECT_EQ(rows[2].tp + rows[2].fn, rows[2].count);
  EXPECT_EQ(rows[7].fn, 176);
  EXPECT_NEAR(rows[0].fn_share_pct, 100.0 * 112 / 176, 1e-9);
  EXPECT_FALSE(rows[7].intensity.has_value());
  EXPECT_EQ(rows[7].count, 177);
}

TEST(Classwise, OverallIsTpWeighted) {
  std::vector<TruthRecord> recs = {
      {IntensityClass::kD, MatchOutcome::kTP, 0.2, 0.4, 30},
      {IntensityClass::kD, MatchOutcome::kTP, 0.4, 0.2, 50},
      {IntensityClass::kSuCS, MatchOutcome::kTP, 0.0, 0.0, 0},
  };
  const auto rows = classwise_table(recs);
  EXPECT_NEAR(rows[0].km_err, 40.0, 1e-12);
  EXPECT_NEAR(rows[7].km_err, 80.0 / 3.0, 1e-12);
  EXPECT_NEAR(rows[7].lat_err, 0.2, 1e-12);
  EXPECT_EQ(rows[7].fn_share_pct, 0.0);
}

TEST(PositionError, MatchesOnBasinGrid) {
  const GridSpec g = basin_grid(Basin::kArabianSea);
  const PixelCoord truth_px = latlon_to_pixel(g, {15.0, 65.0});
  const PixelCoord det_px = latlon_to_pixel(g, {15.1, 65.0});
  const TruthRecord r = position_error(g, Det(det_px.x, det_px.y, 0.9),
                                       Truth(truth_px.x, truth_px.y, 4));
  EXPECT_NEAR(r.abs_dlat, 0.1, 1e-9);
  EXPECT_NEAR(r.abs_dlon, 0.0, 1e-9);
  EXPECT_NEAR(r.km, 11.1195, 1e-3);
  EXPECT_EQ(r.intensity, IntensityClass::kVSCS);
}

// ---- PR / F1 ----

TEST(PrF1, Examples) {
  const PrF1 c = pr_f1(1695, 176, 436, 1499);
  EXPECT_NEAR(*c.recall, 0.906, 5e-4);
  EXPECT_NEAR(*c.precision, 0.795, 5e-4);
  EXPECT_NEAR(*c.f1, 0.847, 5e-4);
  EXPECT_NEAR(*c.nc_fp_rate, 436.0 / 1499.0, 1e-12);
  const PrF1 s = pr_f1(1554, 317, 366, 1499);
  // Quoted to two decimals at source.
  EXPECT_NEAR(*s.recall, 0.830, 5e-3);
  EXPECT_NEAR(*s.precision, 0.809, 5e-3);
  EXPECT_EQ(*pr_f1(10, 5, 0, 3).precision, 1.0);
}

TEST(PrF1, UndefinedDenominators) {
  const PrF1 z = pr_f1(0, 0, 0, 0);
  EXPECT_TRUE(z.undefined());
  EXPECT_FALSE(z.recall.has_value());
  EXPECT_FALSE(z.precision.has_value());
  const PrF1 zero_tp = pr_f1(0, 5, 3, 10);
  EXPECT_EQ(*zero_tp.recall, 0.0);
  EXPECT_EQ(*zero_tp.precision, 0.0);
  EXPECT_FALSE(zero_tp.f1.has_value());
  EXPECT_THROW(pr_f1(-1, 0, 0, 0), InvalidArgument);
}

// ---- Average precision ----

TEST(AveragePrecision, HandBuiltEnvelope) {
  ApImage img;
  img.truths = {Truth(100, 100), Truth(400, 400)};
  img.detections = {Det(100, 100, 0.9), Det(800, 800, 0.8), Det(400, 400, 0.7)};
  const std::vector<ApImage> v = {img};
  EXPECT_NEAR(average_precision_at(v, 0.5), 0.5 * 1.0 + 0.5 * (2.0 / 3.0), 1e-9);
}

TEST(AveragePrecision, PerfectAndEmpty) {
  ApImage img;
  img.truths = {Truth(100, 100)};
  img.detections = {Det(100, 100, 0.9)};
  const std::vector<ApImage> perfect = {img};
  const ApResult r = average_precision(perfect);
  ASSERT_EQ(r.thresholds.size(), 10u);
  EXPECT_NEAR(r.thresholds.back(), 0.95, 1e-12);
  EXPECT_DOUBLE_EQ(r.map50, 1.0);
  EXPECT_DOUBLE_EQ(r.map50_95, 1.0);
  img.detections.clear();
  const std::vector<ApImage> none = {img};
  EXPECT_EQ(average_precision(none).map50_95, 0.0);
}

TEST(AveragePrecision, IouThresholdsBite) {
  ApImage img;
  img.truths = {Truth(100, 100, 0, 100)};
  // Shifted by 20 px: IoU = 80*100 / (2*10000 - 8000) = 2/3.
  img.detections = {Det(120, 100, 0.9, 100)};
  EXPECT_NEAR(box_iou(120, 100, 100, 100, 100, 100, 100, 100), 2.0 / 3.0, 1e-12);
  const std::vector<ApImage> v = {img};
  const ApResult r = average_precision(v);
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    EXPECT_EQ(r.ap[k], r.thresholds[k] <= 2.0 / 3.0 ? 1.0 : 0.0) << r.thresholds[k];
  }
  EXPECT_NEAR(r.map50_95, 0.4, 1e-12);
}

TEST(AveragePrecision, ReorderInvariance) {
  Rng rng(8);
  std::vector<ApImage> imgs(20);
  for (auto& img : imgs) {
    img.truths = {Truth(rng.uniform(100, 900), rng.uniform(100, 900))};
    const auto& t = img.truths[0];
    // Tied detections share their outcome: the top detection claims the
    // truth, so every 0.5 and 0.4 is a miss.
    img.detections = {Det(t.cx + 5, t.cy, 0.5), Det(t.cx + 400, t.cy, 0.4),
                      Det(t.cx + 300, t.cy + 300, 0.4), Det(t.cx, t.cy + 3, rng.uniform(0.6, 1.0))};
  }
  const double base = average_precision(imgs).map50_95;
  for (auto& img : imgs) std::reverse(img.detections.begin(), img.detections.end());
  EXPECT_DOUBLE_EQ(average_precision(imgs).map50_95, base);
  std::reverse(imgs.begin(), imgs.end());
  EXPECT_DOUBLE_EQ(average_precision(imgs).map50_95, base);
}

TEST(AveragePrecision, PerClassAveragesPresentClasses) {
  ApImage img;
  img.truths = {Truth(100, 100, 1), Truth(500, 500, 3)};
  // The class-3 box is found under the wrong class.
  img.detections = {{1, 0.9, 100, 100, 50, 50}, {2, 0.8, 500, 500, 50, 50}};
  const std::vector<ApImage> v = {img};
  EXPECT_DOUBLE_EQ(average_precision_at(v, 0.5, true), 0.5);
  EXPECT_DOUBLE_EQ(average_precision_at(v, 0.5, false), 1.0);
}

// ---- Intensity errors ----

IntensitySeries Series(const std::vector<double>& w, int offset_h = 0) {
  IntensitySeries s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.samples.push_back({Instant(hours(offset_h + 3 * static_cast<int>(i))), w[i]});
  }
  return s;
}

TEST(IntensityErrors, Examples) {
  const auto e = intensity_errors(Series({53, 26}), Series({50, 30}));
  EXPECT_NEAR(e.overall.rmse, std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(e.overall.mae, 3.5, 1e-12);
  EXPECT_EQ(e.overall.n, 2);
  EXPECT_EQ(e.per_class.at(IntensityClass::kSCS).n, 1);
  EXPECT_EQ(e.per_class.at(IntensityClass::kDD).n, 1);
  const auto same = intensity_errors(Series({10, 70}), Series({10, 70}));
  EXPECT_EQ(same.overall.rmse, 0.0);
  EXPECT_EQ(same.below_tc, 1);
  EXPECT_THROW(intensity_errors(Series({1}), Series({1}, 1)), EmptyOverlapError);
}

TEST(IntensityErrors, ConstantBiasAndRandomOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    std::vector<double> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.uniform(0, 150);
      pred[i] = truth[i] + 5.0;
    }
    auto e = intensity_errors(Series(pred), Series(truth));
    EXPECT_NEAR(e.overall.rmse, 5.0, 1e-9);
    EXPECT_NEAR(e.overall.mae, 5.0, 1e-9);
    if (n == 1) continue;
    for (double& p : pred) p = rng.uniform(0, 150);
    // Partial overlap: prediction series shifted by one step.
    e = intensity_errors(Series(pred, 3), Series(truth));
    double sq = 0, ab = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = pred[i] - truth[i + 1];
      sq += d * d;
      ab += std::abs(d);
    }
    EXPECT_EQ(e.overall.n, static_cast<long>(n - 1));
    EXPECT_NEAR(e.overall.rmse, std::sqrt(sq / (n - 1)), 1e-9);
    EXPECT_NEAR(e.overall.mae, ab / (n - 1), 1e-9);
  }
}

// ---- Case study ----

TEST(CaseStudy, EquatorOffset) {
  const Instant t0(hours(1000));
  const BestTrack bt("EQ", "EQ", Basin::kArabianSea, {{t0, {0.0, 60.0}, 40}, {t0 + hours(6), {0.0, 61.0}, 40}});
  const std::vector<TrackPrediction> preds = {{t0, {0.1, 60.0}}};
  const CaseStudyReport r = case_study(preds, bt, IntensitySeries{});
  EXPECT_NEAR(*r.mean_track_km, 11.12, 0.005);
  EXPECT_EQ(r.track_samples, 1);
  EXPECT_FALSE(r.intensity_rmse.has_value());
}

TEST(CaseStudy, PerfectPredictionsAndWindowing) {
  const Instant t0(hours(2000));
  const BestTrack bt("E", "E", Basin::kBayOfBengal,
                     {{t0, {12, 88}, 30}, {t0 + hours(3), {13, 88}, 60}, {t0 + hours(6), {14, 87}, 90}});
  std::vector<TrackPrediction> track;
  IntensitySeries wind;
  for (int m = -60; m <= 420; m += 30) {
    const Instant t = t0 + minutes(m);
    if (!bt.active_at(t)) {
      track.push_back({t, {0, 0}});
      wind.samples.push_back({t, 500});
      continue;
    }
    const InterpFix f = interpolate_track(bt, t);
    track.push_back({t, f.position});
    wind.samples.push_back({t, f.wind_kt});
  }
  const CaseStudyReport raw = case_study(track, bt, wind, 1);
  EXPECT_NEAR(*raw.mean_track_km, 0.0, 1e-9);
  EXPECT_NEAR(*raw.intensity_rmse, 0.0, 1e-9);
  EXPECT_EQ(raw.track_samples, 13);
  EXPECT_EQ(raw.rows.size(), 13u);

  // With smoothing, the trailing mean of a linear ramp lags by half the
  // window; recompute the expected error directly.
  const CaseStudyReport sm = case_study(track, bt, wind, 6);
  double sq = 0;
  for (int i = 0; i < 13; ++i) {
    double sum = 0;
    int n = 0;
    for (int k = i; k >= 0 && n < 6; --k, ++n) sum += 30.0 + 5.0 * k;
    const double d = sum / n - (30.0 + 5.0 * i);
    sq += d * d;
  }
  EXPECT_NEAR(*sm.intensity_rmse, std::sqrt(sq / 13), 1e-9);

  const auto gj = nlohmann::json::parse(track_geojson(sm, bt));
  EXPECT_EQ(gj["type"], "FeatureCollection");
  EXPECT_EQ(gj["features"][0]["geometry"]["coordinates"].size(), 13u);
  EXPECT_EQ(gj["features"][1]["geometry"]["coordinates"][0][0], 88.0);
}

TEST(CaseStudy, NoOverlapThrows) {
  const Instant t0(hours(3000));
  const BestTrack bt("E", "E", Basin::kBayOfBengal, {{t0, {12, 88}, 30}, {t0 + hours(3), {13, 88}, 60}});
  const std::vector<TrackPrediction> preds = {{t0 + hours(5), {12, 88}}};
  EXPECT_THROW(case_study(preds, bt, IntensitySeries{}), EmptyOverlapError);
}

// ---- Reports ----

TEST(Reports, CsvAndJsonShapes) {
  std::vector<TruthRecord> recs = {{IntensityClass::kD, MatchOutcome::kTP, 0.1, 0.2, 20},
                                   {IntensityClass::kD}};
  const auto rows = classwise_table(recs);
  const std::string csv = classwise_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,lat_err,lon_err,km_err,fn,fn_share_pct,count");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);

  DetectionReport rep;
  rep.classwise = rows;
  rep.type1 = pr_f1(1, 1, 0, 2);
  const auto j = nlohmann::json::parse(detection_report_json(rep));
  EXPECT_EQ(j["params"]["background_rule"], "both_axes_exceed");
  EXPECT_EQ(j["params"]["background_px"], 100.0);
  EXPECT_TRUE(j.contains("map50_95"));
  EXPECT_EQ(j["classwise"].size(), 8u);
}

}  // namespace
}  // namespace cyclotrack
