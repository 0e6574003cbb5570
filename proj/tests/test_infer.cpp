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
#include <filesystem>
#include <fstream>
#include <functional>

#include "cyclotrack/infer.hpp"
#include "cyclotrack/random.hpp"

namespace cyclotrack {
namespace {

namespace fs = std::filesystem;
using namespace layers;

GrayImage Blank(int rows, int cols, std::uint8_t v = 0) {
  GrayImage g;
  g.grid = GridSpec(10.0, 0.0, 0.0, 10.0, rows, cols);
  g.pixels = Raster<std::uint8_t>(rows, cols, v);
  return g;
}

void FillRect(GrayImage& g, int r0, int c0, int h, int w, std::uint8_t v) {
  for (int r = r0; r < r0 + h; ++r)
    for (int c = c0; c < c0 + w; ++c) g.pixels(r, c) = v;
}

// ---- Blob detector ----

TEST(BlobDetect, SquareCentroidAndBox) {
  GrayImage g = Blank(100, 100);
  FillRect(g, 30, 40, 21, 21, 200);
  const auto d = blob_detect(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].cx, 50.5, 0.5);
  EXPECT_NEAR(d[0].cy, 40.5, 0.5);
  EXPECT_DOUBLE_EQ(d[0].w, 21.0);
  EXPECT_DOUBLE_EQ(d[0].h, 21.0);
  EXPECT_DOUBLE_EQ(d[0].confidence, 441.0 / 10000.0);
}

TEST(BlobDetect, TwoBlobsLargerFirst) {
  GrayImage g = Blank(120, 120);
  FillRect(g, 5, 5, 10, 10, 100);
  FillRect(g, 60, 60, 30, 30, 100);
  const auto d = blob_detect(g);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_GT(d[0].confidence, d[1].confidence);
  EXPECT_NEAR(d[0].cx, 75.0, 1e-9);
  EXPECT_NEAR(d[1].cx, 10.0, 1e-9);
}

TEST(BlobDetect, ThresholdAreaAndConnectivity) {
  GrayImage g = Blank(60, 60);
  FillRect(g, 0, 0, 7, 7, 44);     // below threshold
  FillRect(g, 20, 20, 7, 7, 45);   // 49 px: below min area
  FillRect(g, 40, 40, 8, 8, 255);  // touches the next only at a corner
  FillRect(g, 48, 48, 8, 8, 255);
  const auto d = blob_detect(g);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].w, 8.0);
  EXPECT_DOUBLE_EQ(d[1].w, 8.0);
}

TEST(BlobDetect, WeightedCentroidFollowsBrightSide) {
  GrayImage g = Blank(40, 40);
  FillRect(g, 10, 10, 10, 5, 100);
  FillRect(g, 10, 15, 10, 5, 250);
  const auto d = blob_detect(g);
  ASSERT_EQ(d.size(), 1u);
  const double want = (100.0 * 5 * 12.5 + 250.0 * 5 * 17.5) / (100.0 * 5 + 250.0 * 5);
  EXPECT_NEAR(d[0].cx, want, 1e-9);
}

// ---- Naive reference executor (double precision, no shared code) ----

using Vec = std::vector<double>;

struct Ref {
  Shape shape;
  Vec v;
};

Ref RefConv(const Conv2D& c, const Ref& x) {
  const int H = x.shape[1], W = x.shape[2];
  const int Hp = H + 2 * c.pad, Wp = W + 2 * c.pad;
  Vec padded(static_cast<std::size_t>(c.in_ch) * Hp * Wp, 0.0);
  for (int ch = 0; ch < c.in_ch; ++ch)
    for (int r = 0; r < H; ++r)
      for (int q = 0; q < W; ++q)
        padded[(ch * Hp + r + c.pad) * Wp + q + c.pad] = x.v[(ch * H + r) * W + q];
  const int oh = (Hp - c.kh) / c.stride + 1, ow = (Wp - c.kw) / c.stride + 1;
  Ref y{{c.out_ch, oh, ow}, Vec(static_cast<std::size_t>(c.out_ch) * oh * ow)};
  for (int o = 0; o < c.out_ch; ++o)
    for (int r = 0; r < oh; ++r)
      for (int q = 0; q < ow; ++q) {
        double s = c.bias[o];
        for (int ch = 0; ch < c.in_ch; ++ch)
          for (int a = 0; a < c.kh; ++a)
            for (int b = 0; b < c.kw; ++b)
              s += c.weight[((o * c.in_ch + ch) * c.kh + a) * c.kw + b] *
                   padded[(ch * Hp + r * c.stride + a) * Wp + q * c.stride + b];
        y.v[(o * oh + r) * ow + q] = s;
      }
  return y;
}

Ref RefPool(const MaxPool& p, const Ref& x) {
  const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
  const int oh = (H - p.k) / p.stride + 1, ow = (W - p.k) / p.stride + 1;
  Ref y{{C, oh, ow}, {}};
  for (int c = 0; c < C; ++c)
    for (int r = 0; r < oh; ++r)
      for (int q = 0; q < ow; ++q) {
        double m = -1e300;
        for (int a = 0; a < p.k; ++a)
          for (int b = 0; b < p.k; ++b)
            m = std::max(m, x.v[(c * H + r * p.stride + a) * W + q * p.stride + b]);
        y.v.push_back(m);
      }
  return y;
}

Ref RefDense(const Dense& d, const Ref& x) {
  Ref y{{d.out}, {}};
  for (int o = 0; o < d.out; ++o) {
    double s = d.bias[o];
    for (int i = 0; i < d.in; ++i) s += d.weight[o * d.in + i] * x.v[i];
    y.v.push_back(s);
  }
  return y;
}

double Sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Ref RefLstm(const LSTM& l, const std::vector<Vec>& seq) {
  Vec h(l.hidden, 0.0), c(l.hidden, 0.0);
  for (const Vec& x : seq) {
    auto gate = [&](int block, int j) {
      const int row = block * l.hidden + j;
      double s = l.b_ih[row] + l.b_hh[row];
      for (int i = 0; i < l.input; ++i) s += l.w_ih[row * l.input + i] * x[i];
      for (int k = 0; k < l.hidden; ++k) s += l.w_hh[row * l.hidden + k] * h[k];
      return s;
    };
    Vec nh(l.hidden);
    for (int j = 0; j < l.hidden; ++j) {
      const double i = Sig(gate(0, j)), f = Sig(gate(1, j));
      const double g = std::tanh(gate(2, j)), o = Sig(gate(3, j));
      c[j] = f * c[j] + i * g;
      nh[j] = o * std::tanh(c[j]);
    }
    h = nh;
  }
  return {{l.hidden}, h};
}

Ref RefApply(const Layer& layer, Ref x) {
  if (auto* c = std::get_if<Conv2D>(&layer)) return RefConv(*c, x);
  if (auto* p = std::get_if<MaxPool>(&layer)) return RefPool(*p, x);
  if (auto* d = std::get_if<Dense>(&layer)) return RefDense(*d, x);
  if (std::holds_alternative<ReLU>(layer)) {
    for (double& v : x.v) v = std::max(0.0, v);
    return x;
  }
  if (std::holds_alternative<Flatten>(layer)) return {{static_cast<int>(x.v.size())}, x.v};
  ADD_FAILURE() << "unexpected layer";
  return x;
}

Vec RefForward(const WeightBundle& b, const Tensor& in) {
  const auto& ls = b.layers();
  if (!b.is_sequence()) {
    Ref x{in.shape, Vec(in.data.begin(), in.data.end())};
    for (const Layer& l : ls) x = RefApply(l, x);
    return x.v;
  }
  const Shape frame(in.shape.begin() + 1, in.shape.end());
  const std::size_t n = shape_elements(frame);
  std::vector<Vec> feats;
  for (int t = 0; t < in.shape[0]; ++t) {
    Ref x{frame, Vec(in.data.begin() + t * n, in.data.begin() + (t + 1) * n)};
    for (int i = 0; i < b.lstm_index(); ++i) x = RefApply(ls[i], x);
    feats.push_back(x.v);
  }
  Ref x = RefLstm(std::get<LSTM>(ls[b.lstm_index()]), feats);
  for (std::size_t i = b.lstm_index() + 1; i < ls.size(); ++i) x = RefApply(ls[i], x);
  return x.v;
}

std::vector<float> RandVec(Rng& rng, std::size_t n, double scale = 0.5) {
  std::vector<float> v(n);
  for (float& f : v) f = static_cast<float>(rng.uniform(-scale, scale));
  return v;
}

Conv2D RandConv(Rng& rng, int in_ch, int out_ch, int k, int stride, int pad) {
  return {out_ch, in_ch, k, k, stride, pad,
          RandVec(rng, static_cast<std::size_t>(out_ch) * in_ch * k * k), RandVec(rng, out_ch)};
}
Dense RandDense(Rng& rng, int in, int out) {
  return {out, in, RandVec(rng, static_cast<std::size_t>(out) * in), RandVec(rng, out)};
}
LSTM RandLstm(Rng& rng, int in, int hidden) {
  return {hidden, in, RandVec(rng, 4u * hidden * in), RandVec(rng, 4u * hidden * hidden),
          RandVec(rng, 4u * hidden), RandVec(rng, 4u * hidden)};
}

Tensor RandInput(Rng& rng, const Shape& s) {
  Tensor t(s);
  for (float& f : t.data) f = static_cast<float>(rng.uniform01());
  return t;
}

void ExpectClose(const Tensor& got, const Vec& want, double tol) {
  ASSERT_EQ(got.data.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(got.data[i], want[i], tol * (1.0 + std::abs(want[i]))) << i;
  }
}

// ---- Executor ----

TEST(Forward, IdentityPointwiseConv) {
  const WeightBundle b({1, 4, 4}, {Conv2D{1, 1, 1, 1, 1, 0, {1.0f}, {0.0f}}},
                       OutputTag::kFeatureVec);
  Rng rng(1);
  const Tensor x = RandInput(rng, {1, 4, 4});
  EXPECT_EQ(forward(b, x).data, x.data);
}

TEST(Forward, HandComputedConvDense) {
  const WeightBundle b({1, 3, 3},
                       {Conv2D{1, 1, 2, 2, 1, 0, {1, 1, 1, 1}, {0.5f}}, ReLU{}, Flatten{},
                        Dense{1, 4, {1, -1, 0, 2}, {1}}},
                       OutputTag::kWindKt);
  const Tensor x({1, 3, 3}, std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  // Conv: 12.5 16.5 24.5 28.5; dense: 12.5 - 16.5 + 57 + 1.
  EXPECT_FLOAT_EQ(forward(b, x).data.at(0), 54.0f);
}

TEST(Forward, StridePadAndPoolShapes) {
  Rng rng(2);
  const WeightBundle b({2, 9, 7}, {RandConv(rng, 2, 3, 3, 2, 1), MaxPool{2, 1}},
                       OutputTag::kFeatureVec);
  EXPECT_EQ(b.output_shape(), (Shape{3, 4, 3}));
}

TEST(Forward, ZeroLstmEmitsZeros) {
  const LSTM l{3, 2, std::vector<float>(24, 0.0f), std::vector<float>(36, 0.0f),
               std::vector<float>(12, 0.0f), std::vector<float>(12, 0.0f)};
  const WeightBundle b({4, 2}, {l}, OutputTag::kFeatureVec);
  Rng rng(3);
  for (float v : forward(b, RandInput(rng, {4, 2})).data) EXPECT_EQ(v, 0.0f);
}

TEST(Forward, SingleUnitLstmClosedForm) {
  // Only the cell-candidate bias is set: i = f = o = 1/2, g = tanh(1).
  LSTM l{1, 1, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}};
  const WeightBundle b({2, 1}, {l}, OutputTag::kFeatureVec);
  const double g = std::tanh(1.0);
  const double c1 = 0.5 * g;
  const double c2 = 0.5 * c1 + 0.5 * g;
  EXPECT_NEAR(forward(b, Tensor({2, 1}, std::vector<float>{7, -3})).data[0],
              0.5 * std::tanh(c2), 1e-6);
}

TEST(Forward, MatchesReferenceOnRandomCnns) {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int c0 = 1 + static_cast<int>(rng.uniform_index(3));
    const int h = 8 + static_cast<int>(rng.uniform_index(10));
    const int w = 8 + static_cast<int>(rng.uniform_index(10));
    const int k = 1 + static_cast<int>(rng.uniform_index(3));
    const int s = 1 + static_cast<int>(rng.uniform_index(2));
    const int p = static_cast<int>(rng.uniform_index(2));
    std::vector<Layer> ls = {RandConv(rng, c0, 4, k, s, p), ReLU{}, MaxPool{2, 2}, Flatten{}};
    const Shape before = WeightBundle({c0, h, w}, ls, OutputTag::kFeatureVec).output_shape();
    ls.push_back(RandDense(rng, before[0], 6));
    ls.push_back(ReLU{});
    ls.push_back(RandDense(rng, 6, 1));
    const WeightBundle b({c0, h, w}, ls, OutputTag::kWindKt);
    const Tensor x = RandInput(rng, {c0, h, w});
    ExpectClose(forward(b, x), RefForward(b, x), 1e-5);
  }
}

TEST(Forward, MatchesReferenceOnRandomSequenceModels) {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform_index(4));
    const int hid = 1 + static_cast<int>(rng.uniform_index(6));
    const WeightBundle b({T, 1, 10, 10},
                         {RandConv(rng, 1, 2, 3, 2, 1), ReLU{}, Flatten{}, RandDense(rng, 50, 7),
                          RandLstm(rng, 7, hid), RandDense(rng, hid, 1)},
                         OutputTag::kWindKt);
    EXPECT_EQ(b.sequence_length(), T);
    const Tensor x = RandInput(rng, {T, 1, 10, 10});
    ExpectClose(forward(b, x), RefForward(b, x), 1e-5);
  }
}

TEST(Forward, RejectsWrongInputShape) {
  const WeightBundle b({1, 4, 4}, {Flatten{}}, OutputTag::kFeatureVec);
  try {
    forward(b, Tensor({1, 4, 5}));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_EQ(e.layer(), -1);
  }
}

// ---- Shape audit ----

struct Mutation {
  const char* name;
  std::function<void(Shape&, std::vector<Layer>&)> apply;
  int layer;
};

// Valid base: [1,8,8] -> conv3 [2,6,6] -> relu -> pool [2,3,3] -> flatten 18
// -> dense 4 -> relu -> dense 1.
std::vector<Layer> BaseLayers(Rng& rng) {
  return {RandConv(rng, 1, 2, 3, 1, 0), ReLU{}, MaxPool{2, 2}, Flatten{},
          RandDense(rng, 18, 4), ReLU{}, RandDense(rng, 4, 1)};
}

TEST(ShapeAudit, MutationsNameTheFirstBadLayer) {
  Rng rng(5);
  auto conv = [](std::vector<Layer>& l) -> Conv2D& { return std::get<Conv2D>(l[0]); };
  auto dense = [](std::vector<Layer>& l, int i) -> Dense& { return std::get<Dense>(l[i]); };
  auto resize = [](std::vector<float>& v, std::size_t n) { v.assign(n, 0.1f); };

  const std::vector<Mutation> muts = {
      {"conv in_ch", [&](Shape&, auto& l) { conv(l).in_ch = 2; resize(conv(l).weight, 36); }, 0},
      {"conv kernel too large", [&](Shape&, auto& l) { conv(l).kh = conv(l).kw = 9; resize(conv(l).weight, 162); }, 0},
      {"conv weight count", [&](Shape&, auto& l) { conv(l).weight.pop_back(); }, 0},
      {"conv bias count", [&](Shape&, auto& l) { conv(l).bias.push_back(0); }, 0},
      {"conv zero stride", [&](Shape&, auto& l) { conv(l).stride = 0; }, 0},
      {"conv negative pad", [&](Shape&, auto& l) { conv(l).pad = -1; }, 0},
      {"input channels", [&](Shape& s, auto&) { s = {3, 8, 8}; }, 0},
      {"flat input to conv", [&](Shape& s, auto&) { s = {64}; }, 0},
      {"pool window", [&](Shape&, auto& l) { l[2] = MaxPool{7, 7}; }, 2},
      {"pool zero stride", [&](Shape&, auto& l) { l[2] = MaxPool{2, 0}; }, 2},
      {"dense in", [&](Shape&, auto& l) { dense(l, 4).in = 17; resize(dense(l, 4).weight, 68); }, 4},
      {"dense weight count", [&](Shape&, auto& l) { dense(l, 4).weight.push_back(0); }, 4},
      {"dense bias count", [&](Shape&, auto& l) { dense(l, 4).bias.pop_back(); }, 4},
      {"dense before flatten", [&](Shape&, auto& l) { l.erase(l.begin() + 3); }, 3},
      {"last dense in", [&](Shape&, auto& l) { dense(l, 6).in = 5; resize(dense(l, 6).weight, 5); }, 6},
      {"wind output width", [&](Shape&, auto& l) { dense(l, 6).out = 2; resize(dense(l, 6).weight, 8); resize(dense(l, 6).bias, 2); }, 6},
      {"conv after flatten", [&](Shape&, auto& l) { l.insert(l.begin() + 4, std::get<Conv2D>(l[0])); }, 4},
      {"pool after flatten", [&](Shape&, auto& l) { l.insert(l.begin() + 5, MaxPool{2, 2}); }, 5},
      {"lstm on unflattened frames", [&](Shape& s, auto& l) { s = {2, 1, 8, 8}; l.insert(l.begin() + 3, RandLstm(rng, 3, 2)); }, 3},
      {"lstm input width", [&](Shape& s, auto& l) { s = {2, 1, 8, 8}; l.insert(l.begin() + 4, RandLstm(rng, 17, 4)); }, 4},
      {"second lstm", [&](Shape& s, auto& l) {
         s = {2, 1, 8, 8};
         l.insert(l.begin() + 4, RandLstm(rng, 18, 18));
         l.insert(l.begin() + 5, RandLstm(rng, 18, 18)); }, 5},
      {"zero-sized input", [&](Shape& s, auto&) { s = {1, 0, 8}; }, -1},
      {"sequence without time axis", [&](Shape& s, auto& l) {
         s = {4};
         l = {RandLstm(rng, 4, 2)}; }, -1},
  };
  ASSERT_GE(muts.size(), 20u);
  for (const auto& m : muts) {
    Shape s = {1, 8, 8};
    std::vector<Layer> l = BaseLayers(rng);
    ASSERT_NO_THROW(WeightBundle(s, l, OutputTag::kWindKt));
    m.apply(s, l);
    try {
      WeightBundle(s, l, OutputTag::kWindKt);
      ADD_FAILURE() << m.name << ": accepted";
    } catch (const ShapeError& e) {
      EXPECT_EQ(e.layer(), m.layer) << m.name << ": " << e.what();
    }
  }
}

TEST(ShapeAudit, NonFiniteWeightsAreFormatErrors) {
  Rng rng(6);
  auto l = BaseLayers(rng);
  std::get<Dense>(l[4]).weight[3] = std::nanf("");
  EXPECT_THROW(WeightBundle({1, 8, 8}, l, OutputTag::kWindKt), FormatError);
}

// ---- Bundle files ----

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cyclotrack_infer_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(BundleFiles, RoundTripPreservesOutputs) {
  Rng rng(8);
  const WeightBundle b({2, 1, 10, 10},
                       {RandConv(rng, 1, 2, 3, 2, 1), ReLU{}, Flatten{}, RandDense(rng, 50, 7),
                        RandLstm(rng, 7, 3), RandDense(rng, 3, 1)},
                       OutputTag::kWindKt, 0.5f);
  const fs::path dir = TempDir("roundtrip");
  write_bundle(b, dir / "m.wb.json");
  ASSERT_TRUE(fs::exists(dir / "m.wb.bin"));
  const WeightBundle back = read_bundle(dir / "m.wb.json");
  EXPECT_EQ(back.input_shape(), b.input_shape());
  EXPECT_EQ(back.input_scale(), 0.5f);
  EXPECT_EQ(back.lstm_index(), 4);
  const Tensor x = RandInput(rng, {2, 1, 10, 10});
  EXPECT_EQ(forward(back, x).data, forward(b, x).data);
}

TEST(BundleFiles, CorruptBlobsAreRejected) {
  Rng rng(9);
  const WeightBundle b({1, 8, 8}, BaseLayers(rng), OutputTag::kWindKt);
  const fs::path dir = TempDir("corrupt");
  write_bundle(b, dir / "m.wb.json");
  {
    std::fstream f(dir / "m.wb.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(5);
    f.put('\x7f');
  }
  EXPECT_THROW(read_bundle(dir / "m.wb.json"), FormatError);

  write_bundle(b, dir / "m.wb.json");
  { std::ofstream(dir / "m.wb.bin", std::ios::app | std::ios::binary) << "abcd"; }
  EXPECT_THROW(read_bundle(dir / "m.wb.json"), FormatError);

  fs::remove(dir / "m.wb.bin");
  EXPECT_THROW(read_bundle(dir / "m.wb.json"), FormatError);
  EXPECT_THROW(write_bundle(b, dir / "m.json"), InvalidArgument);
}

TEST(BundleFiles, T32RoundTrip) {
  const fs::path dir = TempDir("t32");
  const Tensor t({2, 3}, std::vector<float>{1, -2, 3.5f, 0, 1e-7f, 6});
  write_t32(t, dir / "a.t32");
  const Tensor back = read_t32(dir / "a.t32");
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(back.data, t.data);
}

// ---- Intensity backends ----

TEST(EstimateIntensity, ScalesPixelsAndClamps) {
  // Mean of the scaled pixels times 1000, output clamped to [0, 200] kt.
  auto make = [](float gain) {
    return WeightBundle({1, 2, 2}, {Flatten{}, Dense{1, 4, {gain, gain, gain, gain}, {0}}},
                        OutputTag::kWindKt, 1.0f / 255.0f);
  };
  const GrayImage crop = Blank(2, 2, 51);
  const std::vector<GrayImage> one = {crop};
  EXPECT_NEAR(estimate_intensity(make(10.0f), one), 8.0, 1e-5);
  EXPECT_EQ(estimate_intensity(make(1000.0f), one), 200.0);
  EXPECT_EQ(estimate_intensity(make(-1.0f), one), 0.0);
  const std::vector<GrayImage> wrong = {Blank(3, 3)};
  EXPECT_THROW(estimate_intensity(make(1.0f), wrong), ShapeError);
  const std::vector<GrayImage> two = {crop, crop};
  EXPECT_THROW(estimate_intensity(make(1.0f), two), ShapeError);
}

TEST(ColdCore, InvertsDepthAtTheCore) {
  GrayImage crop = Blank(300, 300, normalize_temperature(295.0));
  crop.pixels(150, 150) = normalize_temperature(215.0);
  crop.pixels(0, 0) = 255;  // outside the core window
  const ColdCoreIntensityBackend backend;
  const std::vector<GrayImage> v = {crop};
  EXPECT_NEAR(backend.estimate(v), (295.0 - gray_to_temperature(crop.pixels(150, 150))) / 0.8,
              1e-9);
  EXPECT_NEAR(backend.estimate(v), 100.0, 1.0);
  EXPECT_THROW(backend.estimate({}), InvalidArgument);
}

// ---- Smoothing ----

IntensitySeries Series(const std::vector<double>& w) {
  IntensitySeries s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.samples.push_back({Instant(hours(3 * static_cast<int>(i))), w[i]});
  }
  return s;
}

TEST(Smooth, Examples) {
  const auto a = smooth(Series({0, 6}));
  EXPECT_DOUBLE_EQ(a.samples[0].wind_kt, 0.0);
  EXPECT_DOUBLE_EQ(a.samples[1].wind_kt, 3.0);
  std::vector<double> ramp(12);
  for (int i = 0; i < 12; ++i) ramp[i] = i;
  EXPECT_DOUBLE_EQ(smooth(Series(ramp)).samples[11].wind_kt, 8.5);
  EXPECT_THROW(smooth(Series(ramp), 0), InvalidArgument);
}

TEST(Smooth, MatchesBruteForceAndKeepsTimestamps) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(1 + rng.uniform_index(40));
    for (double& v : w) v = rng.uniform(0, 150);
    const int window = 1 + static_cast<int>(rng.uniform_index(10));
    const auto s = Series(w);
    const auto out = smooth(s, window);
    ASSERT_EQ(out.samples.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      double sum = 0;
      int n = 0;
      for (int k = static_cast<int>(i); k >= 0 && n < window; --k, ++n) sum += w[k];
      EXPECT_NEAR(out.samples[i].wind_kt, sum / n, 1e-9);
      EXPECT_EQ(out.samples[i].timestamp, s.samples[i].timestamp);
    }
    if (window == 1) {
      for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(out.samples[i].wind_kt, w[i]);
    }
  }
}

TEST(IntensitySeries, Validation) {
  auto s = Series({1, 2});
  EXPECT_NO_THROW(s.validate());
  s.samples[1].timestamp = s.samples[0].timestamp;
  EXPECT_THROW(s.validate(), InvalidArgument);
  EXPECT_THROW(Series({-1}).validate(), InvalidArgument);
}

}  // namespace
}  // namespace cyclotrack
