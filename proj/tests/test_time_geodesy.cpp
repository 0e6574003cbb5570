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

#include <cmath>
#include <numbers>

#include "cyclotrack/error.hpp"
#include "cyclotrack/geodesy.hpp"
#include "cyclotrack/hash.hpp"
#include "cyclotrack/random.hpp"
#include "cyclotrack/time.hpp"

namespace cyclotrack {
namespace {

TEST(Time, ParsesAndFormatsUtc) {
  const Instant t = parse_iso8601("2019-10-24T06:30:00Z");
  EXPECT_EQ(format_iso8601(t), "2019-10-24T06:30:00Z");
  EXPECT_EQ(format_compact(t), "20191024T063000Z");
  EXPECT_EQ(parse_iso8601("2019-10-24T06:30Z"), t);
  EXPECT_EQ(t.time_since_epoch().count(), 1571898600);
}

TEST(Time, RejectsMalformed) {
  for (const char* bad : {"", "2019-10-24", "2019-13-01T00:00:00Z", "2019-02-30T00:00:00Z",
                          "2019-10-24T25:00:00Z", "2019-10-24T06:30:00", "x019-10-24T06:30:00Z",
                          "2019-10-24T06:30:00Z trailing"}) {
    EXPECT_THROW(parse_iso8601(bad), FormatError) << bad;
  }
}

TEST(Geodesy, OneDegreeOfLongitudeOnTheEquator) {
  // R * pi / 180 with R = 6371 km.
  const double expected = 6371.0 * std::numbers::pi / 180.0;
  EXPECT_NEAR(haversine_km({0, 0}, {0, 1}), expected, 1e-9);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 1}), 111.195, 0.01);
}

TEST(Geodesy, AntipodesAndPoles) {
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), 6371.0 * std::numbers::pi, 1e-6);
  EXPECT_NEAR(haversine_km({90, 0}, {-90, 0}), 6371.0 * std::numbers::pi, 1e-6);
  EXPECT_DOUBLE_EQ(haversine_km({12.5, 80.0}, {12.5, 80.0}), 0.0);
}

TEST(Geodesy, MetricPropertiesOnRandomTriples) {
  Rng rng(11);
  auto point = [&] { return LatLon{rng.uniform(-89, 89), rng.uniform(-180, 180)}; };
  for (int i = 0; i < 2000; ++i) {
    const LatLon a = point(), b = point(), c = point();
    const double ab = haversine_km(a, b), ba = haversine_km(b, a);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(haversine_km(a, c), ab + haversine_km(b, c) + 1e-9);
  }
}

TEST(Geodesy, BearingCardinalDirections) {
  EXPECT_NEAR(initial_bearing({0, 0}, {1, 0}), 0.0, 1e-12);
  EXPECT_NEAR(initial_bearing({0, 0}, {0, 1}), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(initial_bearing({0, 0}, {-1, 0}), std::numbers::pi, 1e-12);
  EXPECT_NEAR(initial_bearing({0, 0}, {0, -1}), -std::numbers::pi / 2, 1e-12);
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng r(9);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(r.uniform_index(7), 7u);
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, PartialShuffleIsAPermutationPrefix) {
  Rng r(1);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  r.partial_shuffle(v, 10);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Hash, KnownSha256Vectors) {
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace cyclotrack
