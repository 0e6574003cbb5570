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

#include <sstream>

#include "cyclotrack/besttrack.hpp"

namespace cyclotrack {
namespace {

Instant T(const char* s) { return parse_iso8601(s); }

BestTrack TwoFix(double w0, double w1, bool l0 = false, bool l1 = false) {
  return BestTrack("E1", "ONE", Basin::kBayOfBengal,
                   {{T("2013-10-08T00:00:00Z"), {10.0, 80.0}, w0, l0},
                    {T("2013-10-08T06:00:00Z"), {12.0, 82.0}, w1, l1}});
}

TEST(Classify, ImdBinEdges) {
  EXPECT_FALSE(classify_intensity(16.9).has_value());
  EXPECT_EQ(classify_intensity(17.0), IntensityClass::kD);
  EXPECT_EQ(classify_intensity(27.999), IntensityClass::kD);
  EXPECT_EQ(classify_intensity(28.0), IntensityClass::kDD);
  EXPECT_EQ(classify_intensity(34.0), IntensityClass::kCS);
  EXPECT_EQ(classify_intensity(48.0), IntensityClass::kSCS);
  EXPECT_EQ(classify_intensity(64.0), IntensityClass::kVSCS);
  EXPECT_EQ(classify_intensity(65.0), IntensityClass::kVSCS);
  EXPECT_EQ(classify_intensity(90.0), IntensityClass::kESCS);
  EXPECT_EQ(classify_intensity(95.0), IntensityClass::kESCS);
  EXPECT_EQ(classify_intensity(119.9), IntensityClass::kESCS);
  EXPECT_EQ(classify_intensity(120.0), IntensityClass::kSuCS);
  EXPECT_EQ(classify_intensity(250.0), IntensityClass::kSuCS);
}

TEST(Classify, NamesRoundTrip) {
  for (IntensityClass c : kAllIntensityClasses) {
    EXPECT_EQ(parse_class(class_name(c)), c);
    EXPECT_EQ(class_from_id(class_id(c)), c);
  }
  EXPECT_THROW(parse_class("TS"), FormatError);
  EXPECT_THROW(class_from_id(7), FormatError);
}

TEST(BestTrack, ValidatesFixes) {
  EXPECT_THROW(BestTrack("E", "N", Basin::kArabianSea, {{T("2019-10-24T00:00Z"), {15, 65}, 30}}),
               FormatError);
  EXPECT_THROW(BestTrack("E", "N", Basin::kArabianSea,
                         {{T("2019-10-24T03:00Z"), {15, 65}, 30},
                          {T("2019-10-24T00:00Z"), {15, 65}, 30}}),
               FormatError);
  EXPECT_THROW(BestTrack("E", "N", Basin::kArabianSea,
                         {{T("2019-10-24T00:00Z"), {15, 65}, -1},
                          {T("2019-10-24T03:00Z"), {15, 65}, 30}}),
               FormatError);
  // 90 E lies outside the AS window.
  EXPECT_THROW(BestTrack("E", "N", Basin::kArabianSea,
                         {{T("2019-10-24T00:00Z"), {15, 90}, 30},
                          {T("2019-10-24T03:00Z"), {15, 65}, 30}}),
               FormatError);
}

TEST(Interpolate, ExactAtKnots) {
  const BestTrack t = TwoFix(30, 40);
  const InterpFix f = interpolate_track(t, T("2013-10-08T06:00:00Z"));
  EXPECT_EQ(f.position, (LatLon{12.0, 82.0}));
  EXPECT_EQ(f.wind_kt, 40.0);
}

TEST(Interpolate, MidpointWindAndClass) {
  const InterpFix f = interpolate_track(TwoFix(30, 40), T("2013-10-08T03:00:00Z"));
  EXPECT_DOUBLE_EQ(f.wind_kt, 35.0);
  EXPECT_EQ(f.intensity, IntensityClass::kCS);
}

TEST(Interpolate, QuarterPointPosition) {
  const InterpFix f = interpolate_track(TwoFix(30, 40), T("2013-10-08T01:30:00Z"));
  EXPECT_DOUBLE_EQ(f.position.lat, 10.5);
  EXPECT_DOUBLE_EQ(f.position.lon, 80.5);
}

TEST(Interpolate, OutsideWindowThrows) {
  const BestTrack t = TwoFix(30, 40);
  EXPECT_THROW(interpolate_track(t, T("2013-10-07T23:59:00Z")), OutOfWindowError);
  EXPECT_THROW(interpolate_track(t, T("2013-10-08T06:01:00Z")), OutOfWindowError);
}

TEST(Interpolate, ClassRederivedFromInterpolatedWind) {
  // 10 kt -> 30 kt crosses the 17 kt TC threshold mid-interval.
  const BestTrack t = TwoFix(10, 30);
  EXPECT_FALSE(interpolate_track(t, T("2013-10-08T01:00:00Z")).intensity.has_value());
  EXPECT_EQ(interpolate_track(t, T("2013-10-08T03:00:00Z")).intensity, IntensityClass::kD);
}

TEST(Interpolate, LandfallFromEitherBracket) {
  const BestTrack t = TwoFix(30, 40, false, true);
  EXPECT_FALSE(interpolate_track(t, T("2013-10-08T00:00:00Z")).landfall);
  EXPECT_TRUE(interpolate_track(t, T("2013-10-08T03:00:00Z")).landfall);
  EXPECT_TRUE(interpolate_track(t, T("2013-10-08T06:00:00Z")).landfall);
}

TEST(EventWindow, SpanOfTwentyThreeHourlyFixes) {
  std::vector<TrackFix> fixes;
  for (int k = 0; k < 20; ++k) {
    fixes.push_back({T("2013-10-08T00:00:00Z") + hours(3 * k), {12.0, 88.0}, 60.0});
  }
  const BestTrack t("PHL", "PHAILIN", Basin::kBayOfBengal, fixes);
  const TimeWindow w = event_window(t);
  EXPECT_EQ(w.end - w.start, hours(57));
  const std::vector<BestTrack> lib = {t};
  EXPECT_EQ(event_windows(lib).size(), 1u);
}

TEST(Csv, RoundTrip) {
  const std::vector<BestTrack> tracks = {TwoFix(30, 40, false, true),
                                         BestTrack("E2", "TWO", Basin::kArabianSea,
                                                   {{T("2019-10-24T00:00Z"), {15.5, 65.25}, 55},
                                                    {T("2019-10-24T03:00Z"), {15.75, 65.0}, 60}})};
  std::stringstream ss;
  write_besttrack_csv(tracks, ss);
  const std::vector<BestTrack> back = parse_besttrack_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].event_id(), "E1");
  EXPECT_EQ(back[1].basin(), Basin::kArabianSea);
  EXPECT_EQ(back[0].fixes()[1].landfall, true);
  EXPECT_EQ(back[1].fixes()[0].position, (LatLon{15.5, 65.25}));
}

TEST(Csv, GroupsByEventAndSortsByTime) {
  std::stringstream ss(
      "event_id,name,basin,timestamp,lat,lon,wind_kt,landfall\n"
      "B,BB,AS,2019-10-24T06:00:00Z,15,65,40,0\n"
      "A,AA,BOB,2019-10-24T03:00:00Z,12,88,30,false\n"
      "B,BB,AS,2019-10-24T03:00:00Z,14,64,35,true\n"
      "A,AA,BOB,2019-10-24T00:00:00Z,11,87,25,0\n");
  const auto t = parse_besttrack_csv(ss);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].event_id(), "B");
  EXPECT_EQ(t[0].fixes()[0].timestamp, T("2019-10-24T03:00:00Z"));
  EXPECT_TRUE(t[0].fixes()[0].landfall);
  EXPECT_EQ(t[1].start(), T("2019-10-24T00:00:00Z"));
}

TEST(Csv, RejectsMalformedRows) {
  const char* header = "event_id,name,basin,timestamp,lat,lon,wind_kt,landfall\n";
  for (const char* row : {"A,AA,AS,2019-10-24T00:00:00Z,15,65,40\n",
                          "A,AA,XX,2019-10-24T00:00:00Z,15,65,40,0\n",
                          "A,AA,AS,2019-10-24T00:00:00Z,1x5,65,40,0\n",
                          "A,AA,AS,2019-10-24T00:00:00Z,15,65,40,maybe\n",
                          "A,AA,AS,not-a-time,15,65,40,0\n"}) {
    std::stringstream ss(std::string(header) + row + "A,AA,AS,2019-10-24T03:00:00Z,15,65,40,0\n");
    EXPECT_THROW(parse_besttrack_csv(ss), FormatError) << row;
  }
  std::stringstream bad_header("id,name\n");
  EXPECT_THROW(parse_besttrack_csv(bad_header), FormatError);
}

}  // namespace
}  // namespace cyclotrack
