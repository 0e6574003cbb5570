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
#include "cyclotrack/infer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cyclotrack/hash.hpp"
#include "json.hpp"

namespace cyclotrack {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void AppendU32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint32_t LoadU32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b]))
         << (8 * b);
  }
  return v;
}

void AppendF32(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  AppendU32(out, bits);
}

float LoadF32(const std::string& in, std::size_t pos) {
  const std::uint32_t bits = LoadU32(in, pos);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

// ---- Tensors -----------------------------------------------------------------

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << (i ? "," : "") << shape[i];
  }
  os << "]";
  return os.str();
}

void write_t32(const Tensor& t, const std::filesystem::path& path) {
  if (t.data.size() != shape_elements(t.shape)) {
    throw InvalidArgument("tensor data does not match its shape");
  }
  std::string blob = std::string("T32", 3) + '\0';
  AppendU32(blob, static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) AppendU32(blob, static_cast<std::uint32_t>(d));
  for (float v : t.data) AppendF32(blob, v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

Tensor read_t32(const std::filesystem::path& path) {
  const std::string blob = ReadAll(path);
  if (blob.size() < 8 || blob.compare(0, 4, std::string("T32", 3) + '\0') != 0) {
    throw FormatError(path.string() + ": not a T32 tensor");
  }
  const std::uint32_t rank = LoadU32(blob, 4);
  if (rank > 8 || blob.size() < 8 + 4 * static_cast<std::size_t>(rank)) {
    throw FormatError(path.string() + ": bad T32 header");
  }
  Shape shape;
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape.push_back(static_cast<int>(LoadU32(blob, 8 + 4 * i)));
  }
  const std::size_t offset = 8 + 4 * static_cast<std::size_t>(rank);
  const std::size_t n = shape_elements(shape);
  if (blob.size() != offset + 4 * n) {
    throw FormatError(path.string() + ": T32 payload size mismatch");
  }
  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = LoadF32(blob, offset + 4 * i);
  return Tensor(std::move(shape), std::move(data));
}

// ---- Blob detector -----------------------------------------------------------

std::vector<Detection> blob_detect(const GrayImage& image,
                                   const BlobDetectorParams& params) {
  const auto& px = image.pixels;
  const int rows = px.rows();
  const int cols = px.cols();
  struct Component {
    Detection det;
    long area;
  };
  std::vector<Component> found;
  std::vector<std::uint8_t> visited(px.size(), 0);
  std::vector<int> stack;

  for (int r0 = 0; r0 < rows; ++r0) {
    for (int c0 = 0; c0 < cols; ++c0) {
      const std::size_t idx0 = static_cast<std::size_t>(r0) * cols + c0;
      if (visited[idx0] || px(r0, c0) < params.threshold) continue;
      long area = 0;
      double wsum = 0.0, wx = 0.0, wy = 0.0, ux = 0.0, uy = 0.0;
      int min_r = r0, max_r = r0, min_c = c0, max_c = c0;
      visited[idx0] = 1;
      stack.assign(1, static_cast<int>(idx0));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / cols;
        const int c = idx % cols;
        const double g = px(r, c);
        ++area;
        wsum += g;
        wx += g * (c + 0.5);
        wy += g * (r + 0.5);
        ux += c + 0.5;
        uy += r + 0.5;
        min_r = std::min(min_r, r);
        max_r = std::max(max_r, r);
        min_c = std::min(min_c, c);
        max_c = std::max(max_c, c);
        const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
        for (const auto& n : nbr) {
          if (n[0] < 0 || n[0] >= rows || n[1] < 0 || n[1] >= cols) continue;
          const std::size_t nidx = static_cast<std::size_t>(n[0]) * cols + n[1];
          if (visited[nidx] || px(n[0], n[1]) < params.threshold) continue;
          visited[nidx] = 1;
          stack.push_back(static_cast<int>(nidx));
        }
      }
      if (area < params.min_area_px) continue;
      Detection d;
      d.class_id = 0;
      if (wsum > 0.0) {
        d.cx = wx / wsum;
        d.cy = wy / wsum;
      } else {
        d.cx = ux / static_cast<double>(area);
        d.cy = uy / static_cast<double>(area);
      }
      d.w = max_c - min_c + 1;
      d.h = max_r - min_r + 1;
      d.confidence =
          std::min(1.0, static_cast<double>(area) / params.saturation_area_px);
      found.push_back({d, area});
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Component& a, const Component& b) {
                     if (a.det.confidence != b.det.confidence) {
                       return a.det.confidence > b.det.confidence;
                     }
                     return a.area > b.area;
                   });
  std::vector<Detection> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back(c.det);
  return out;
}

// ---- Shapes ------------------------------------------------------------------

std::string layer_type_name(const Layer& layer) {
  return std::visit(
      Overloaded{[](const layers::Conv2D&) { return "conv2d"; },
                 [](const layers::ReLU&) { return "relu"; },
                 [](const layers::MaxPool&) { return "maxpool"; },
                 [](const layers::Flatten&) { return "flatten"; },
                 [](const layers::Dense&) { return "dense"; },
                 [](const layers::LSTM&) { return "lstm"; }},
      layer);
}

Shape layer_output_shape(const Layer& layer, const Shape& in, int index) {
  auto fail = [&](const std::string& msg) -> Shape {
    throw ShapeError(index, layer_type_name(layer) + " " + msg + " (input " +
                                shape_to_string(in) + ")");
  };
  return std::visit(
      Overloaded{
          [&](const layers::Conv2D& c) -> Shape {
            if (in.size() != 3) return fail("expects a [C,H,W] input");
            if (c.out_ch < 1 || c.kh < 1 || c.kw < 1 || c.stride < 1 ||
                c.pad < 0) {
              return fail("has invalid hyper-parameters");
            }
            if (in[0] != c.in_ch) {
              return fail("declares in_ch " + std::to_string(c.in_ch));
            }
            const int h = in[1] + 2 * c.pad - c.kh;
            const int w = in[2] + 2 * c.pad - c.kw;
            if (h < 0 || w < 0) return fail("kernel exceeds padded input");
            return {c.out_ch, h / c.stride + 1, w / c.stride + 1};
          },
          [&](const layers::ReLU&) -> Shape { return in; },
          [&](const layers::MaxPool& p) -> Shape {
            if (in.size() != 3) return fail("expects a [C,H,W] input");
            if (p.k < 1 || p.stride < 1) return fail("has invalid window");
            if (in[1] < p.k || in[2] < p.k) return fail("window exceeds input");
            return {in[0], (in[1] - p.k) / p.stride + 1,
                    (in[2] - p.k) / p.stride + 1};
          },
          [&](const layers::Flatten&) -> Shape {
            return {static_cast<int>(shape_elements(in))};
          },
          [&](const layers::Dense& d) -> Shape {
            if (d.out < 1 || d.in < 1) return fail("has invalid sizes");
            if (in.size() != 1) return fail("expects a flat input");
            if (in[0] != d.in) return fail("declares in " + std::to_string(d.in));
            return {d.out};
          },
          [&](const layers::LSTM& l) -> Shape {
            if (l.hidden < 1 || l.input < 1) return fail("has invalid sizes");
            if (in.size() != 2) return fail("expects a [T,F] input");
            if (in[1] != l.input) {
              return fail("declares input " + std::to_string(l.input));
            }
            return {l.hidden};
          },
      },
      layer);
}

namespace {

void CheckTensor(const std::vector<float>& t, std::size_t expected, int index,
                 const char* what) {
  if (t.size() != expected) {
    throw ShapeError(index, std::string(what) + " has " +
                                std::to_string(t.size()) + " values, expected " +
                                std::to_string(expected));
  }
  for (float v : t) {
    if (!std::isfinite(v)) {
      throw FormatError("layer " + std::to_string(index) + ": " + what +
                        " contains non-finite values");
    }
  }
}

void CheckWeights(const Layer& layer, int index) {
  std::visit(Overloaded{
                 [&](const layers::Conv2D& c) {
                   CheckTensor(c.weight,
                               static_cast<std::size_t>(c.out_ch) * c.in_ch *
                                   c.kh * c.kw,
                               index, "conv2d weight");
                   CheckTensor(c.bias, static_cast<std::size_t>(c.out_ch), index,
                               "conv2d bias");
                 },
                 [&](const layers::Dense& d) {
                   CheckTensor(d.weight, static_cast<std::size_t>(d.out) * d.in,
                               index, "dense weight");
                   CheckTensor(d.bias, static_cast<std::size_t>(d.out), index,
                               "dense bias");
                 },
                 [&](const layers::LSTM& l) {
                   const auto g = static_cast<std::size_t>(4 * l.hidden);
                   CheckTensor(l.w_ih, g * l.input, index, "lstm w_ih");
                   CheckTensor(l.w_hh, g * l.hidden, index, "lstm w_hh");
                   CheckTensor(l.b_ih, g, index, "lstm b_ih");
                   CheckTensor(l.b_hh, g, index, "lstm b_hh");
                 },
                 [](const auto&) {},
             },
             layer);
}

}  // namespace

WeightBundle::WeightBundle(Shape input_shape, std::vector<Layer> layer_list,
                           OutputTag output, float input_scale)
    : input_shape_(std::move(input_shape)),
      layers_(std::move(layer_list)),
      output_(output),
      input_scale_(input_scale) {
  if (input_shape_.empty() || input_shape_.size() > 4) {
    throw ShapeError(-1, "input rank must be 1..4");
  }
  for (int d : input_shape_) {
    if (d < 1) throw ShapeError(-1, "input dims must be positive");
  }
  if (!std::isfinite(input_scale_)) {
    throw FormatError("input_scale must be finite");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (std::holds_alternative<layers::LSTM>(layers_[i])) {
      if (lstm_index_ >= 0) {
        throw ShapeError(static_cast<int>(i), "only one lstm layer is supported");
      }
      lstm_index_ = static_cast<int>(i);
    }
  }

  Shape s = input_shape_;
  if (is_sequence()) {
    if (s.size() < 2) {
      throw ShapeError(-1, "sequence input needs a leading time axis");
    }
    s.erase(s.begin());
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const int idx = static_cast<int>(i);
    CheckWeights(layers_[i], idx);
    if (idx == lstm_index_) {
      if (s.size() != 1) {
        throw ShapeError(idx, "per-frame features must be flat before lstm "
                              "(got " + shape_to_string(s) + ")");
      }
      s = layer_output_shape(layers_[i], {input_shape_[0], s[0]}, idx);
    } else {
      s = layer_output_shape(layers_[i], s, idx);
    }
  }
  if (output_ == OutputTag::kWindKt && shape_elements(s) != 1) {
    throw ShapeError(static_cast<int>(layers_.size()) - 1,
                     "wind_kt output must be a single value, got " +
                         shape_to_string(s));
  }
  output_shape_ = s;
}

int WeightBundle::sequence_length() const noexcept {
  return is_sequence() ? input_shape_[0] : 1;
}

// ---- Forward -----------------------------------------------------------------

namespace {

float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

Tensor ApplyConv(const layers::Conv2D& c, const Tensor& x) {
  const int in_h = x.shape[1], in_w = x.shape[2];
  const int out_h = (in_h + 2 * c.pad - c.kh) / c.stride + 1;
  const int out_w = (in_w + 2 * c.pad - c.kw) / c.stride + 1;
  Tensor y({c.out_ch, out_h, out_w});
  for (int o = 0; o < c.out_ch; ++o) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        double acc = c.bias[static_cast<std::size_t>(o)];
        for (int ch = 0; ch < c.in_ch; ++ch) {
          for (int ky = 0; ky < c.kh; ++ky) {
            const int iy = oy * c.stride - c.pad + ky;
            if (iy < 0 || iy >= in_h) continue;
            const float* row =
                &x.data[(static_cast<std::size_t>(ch) * in_h + iy) * in_w];
            const float* wrow =
                &c.weight[((static_cast<std::size_t>(o) * c.in_ch + ch) * c.kh +
                           ky) *
                          c.kw];
            for (int kx = 0; kx < c.kw; ++kx) {
              const int ix = ox * c.stride - c.pad + kx;
              if (ix < 0 || ix >= in_w) continue;
              acc += static_cast<double>(wrow[kx]) * row[ix];
            }
          }
        }
        y.data[(static_cast<std::size_t>(o) * out_h + oy) * out_w + ox] =
            static_cast<float>(acc);
      }
    }
  }
  return y;
}

Tensor ApplyPool(const layers::MaxPool& p, const Tensor& x) {
  const int ch = x.shape[0], in_h = x.shape[1], in_w = x.shape[2];
  const int out_h = (in_h - p.k) / p.stride + 1;
  const int out_w = (in_w - p.k) / p.stride + 1;
  Tensor y({ch, out_h, out_w});
  for (int c = 0; c < ch; ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        float m = -INFINITY;
        for (int ky = 0; ky < p.k; ++ky) {
          for (int kx = 0; kx < p.k; ++kx) {
            const int iy = oy * p.stride + ky, ix = ox * p.stride + kx;
            m = std::max(
                m, x.data[(static_cast<std::size_t>(c) * in_h + iy) * in_w + ix]);
          }
        }
        y.data[(static_cast<std::size_t>(c) * out_h + oy) * out_w + ox] = m;
      }
    }
  }
  return y;
}

Tensor ApplyDense(const layers::Dense& d, const Tensor& x) {
  Tensor y({d.out});
  for (int o = 0; o < d.out; ++o) {
    double acc = d.bias[static_cast<std::size_t>(o)];
    const float* w = &d.weight[static_cast<std::size_t>(o) * d.in];
    for (int i = 0; i < d.in; ++i) acc += static_cast<double>(w[i]) * x.data[i];
    y.data[static_cast<std::size_t>(o)] = static_cast<float>(acc);
  }
  return y;
}

Tensor ApplyLstm(const layers::LSTM& l, const Tensor& seq) {
  const int steps = seq.shape[0];
  const int hsz = l.hidden;
  std::vector<float> h(static_cast<std::size_t>(hsz), 0.0f);
  std::vector<float> c(static_cast<std::size_t>(hsz), 0.0f);
  std::vector<float> gates(static_cast<std::size_t>(4 * hsz));
  for (int t = 0; t < steps; ++t) {
    const float* xt = &seq.data[static_cast<std::size_t>(t) * l.input];
    for (int g = 0; g < 4 * hsz; ++g) {
      double acc = static_cast<double>(l.b_ih[static_cast<std::size_t>(g)]) +
                   l.b_hh[static_cast<std::size_t>(g)];
      const float* wi = &l.w_ih[static_cast<std::size_t>(g) * l.input];
      for (int i = 0; i < l.input; ++i) acc += static_cast<double>(wi[i]) * xt[i];
      const float* wh = &l.w_hh[static_cast<std::size_t>(g) * hsz];
      for (int j = 0; j < hsz; ++j) acc += static_cast<double>(wh[j]) * h[j];
      gates[static_cast<std::size_t>(g)] = static_cast<float>(acc);
    }
    for (int j = 0; j < hsz; ++j) {
      const float ig = Sigmoid(gates[j]);
      const float fg = Sigmoid(gates[hsz + j]);
      const float gg = std::tanh(gates[2 * hsz + j]);
      const float og = Sigmoid(gates[3 * hsz + j]);
      c[j] = fg * c[j] + ig * gg;
      h[j] = og * std::tanh(c[j]);
    }
  }
  return Tensor({hsz}, std::move(h));
}

Tensor Apply(const Layer& layer, Tensor x) {
  return std::visit(
      Overloaded{
          [&](const layers::Conv2D& c) { return ApplyConv(c, x); },
          [&](const layers::ReLU&) {
            for (float& v : x.data) v = std::max(v, 0.0f);
            return std::move(x);
          },
          [&](const layers::MaxPool& p) { return ApplyPool(p, x); },
          [&](const layers::Flatten&) {
            x.shape = {static_cast<int>(x.data.size())};
            return std::move(x);
          },
          [&](const layers::Dense& d) { return ApplyDense(d, x); },
          [&](const layers::LSTM& l) { return ApplyLstm(l, x); },
      },
      layer);
}

}  // namespace

Tensor forward(const WeightBundle& bundle, const Tensor& input) {
  if (input.shape != bundle.input_shape() ||
      input.data.size() != shape_elements(input.shape)) {
    throw ShapeError(-1, "input shape " + shape_to_string(input.shape) +
                             " does not match declared " +
                             shape_to_string(bundle.input_shape()));
  }
  const auto& ls = bundle.layers();
  if (!bundle.is_sequence()) {
    Tensor x = input;
    for (const Layer& l : ls) x = Apply(l, std::move(x));
    return x;
  }

  const int steps = input.shape[0];
  const Shape frame_shape(input.shape.begin() + 1, input.shape.end());
  const std::size_t frame_size = shape_elements(frame_shape);
  const auto split = static_cast<std::size_t>(bundle.lstm_index());
  std::vector<float> feats;
  int feat_dim = 0;
  for (int t = 0; t < steps; ++t) {
    const auto begin = input.data.begin() + static_cast<std::ptrdiff_t>(t * frame_size);
    Tensor x(frame_shape,
             std::vector<float>(begin, begin + static_cast<std::ptrdiff_t>(frame_size)));
    for (std::size_t i = 0; i < split; ++i) x = Apply(ls[i], std::move(x));
    feat_dim = static_cast<int>(x.data.size());
    feats.insert(feats.end(), x.data.begin(), x.data.end());
  }
  Tensor x({steps, feat_dim}, std::move(feats));
  for (std::size_t i = split; i < ls.size(); ++i) x = Apply(ls[i], std::move(x));
  return x;
}

double estimate_intensity(const WeightBundle& bundle,
                          std::span<const GrayImage> crops) {
  if (bundle.output() != OutputTag::kWindKt) {
    throw ShapeError(static_cast<int>(bundle.layers().size()) - 1,
                     "bundle output is not tagged wind_kt");
  }
  const Shape& in = bundle.input_shape();
  const int frames = bundle.sequence_length();
  const Shape frame(in.begin() + (bundle.is_sequence() ? 1 : 0), in.end());
  if (frame.size() != 3 || frame[0] != 1) {
    throw ShapeError(-1, "intensity bundles take [1,H,W] frames");
  }
  if (static_cast<int>(crops.size()) != frames) {
    throw ShapeError(-1, "expected " + std::to_string(frames) +
                             " crops, got " + std::to_string(crops.size()));
  }
  Tensor x(in);
  std::size_t pos = 0;
  for (const GrayImage& crop : crops) {
    if (crop.pixels.rows() != frame[1] || crop.pixels.cols() != frame[2]) {
      throw ShapeError(-1, "crop is " + std::to_string(crop.pixels.rows()) +
                               "x" + std::to_string(crop.pixels.cols()) +
                               ", bundle expects " + std::to_string(frame[1]) +
                               "x" + std::to_string(frame[2]));
    }
    for (std::uint8_t g : crop.pixels.data()) {
      x.data[pos++] = static_cast<float>(g) * bundle.input_scale();
    }
  }
  const Tensor y = forward(bundle, x);
  return std::clamp(static_cast<double>(y.data.at(0)), 0.0, 200.0);
}

double ColdCoreIntensityBackend::estimate(
    std::span<const GrayImage> crops) const {
  if (crops.empty()) throw InvalidArgument("no crops given");
  const auto& px = crops.back().pixels;
  const int half = params_.core_px / 2;
  const int r0 = std::max(0, px.rows() / 2 - half);
  const int r1 = std::min(px.rows(), px.rows() / 2 + half + 1);
  const int c0 = std::max(0, px.cols() / 2 - half);
  const int c1 = std::min(px.cols(), px.cols() / 2 + half + 1);
  std::uint8_t brightest = 0;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) brightest = std::max(brightest, px(r, c));
  }
  const double depth = params_.background_k - gray_to_temperature(brightest);
  return std::clamp(depth / params_.kelvin_per_kt, 0.0, 200.0);
}

// ---- Bundle files ------------------------------------------------------------

namespace {

constexpr const char* kBundleFormat = "cyclotrack.weight_bundle";

std::filesystem::path BlobPathFor(const std::filesystem::path& manifest) {
  std::string s = manifest.string();
  const std::string suffix = ".wb.json";
  if (s.size() < suffix.size() ||
      s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0) {
    throw InvalidArgument("weight bundle path must end in .wb.json: " + s);
  }
  return s.substr(0, s.size() - suffix.size()) + ".wb.bin";
}

nlohmann::ordered_json TensorEntry(const char* name, Shape shape) {
  return {{"name", name}, {"shape", shape}};
}

}  // namespace

void write_bundle(const WeightBundle& bundle,
                  const std::filesystem::path& path) {
  const auto blob_path = BlobPathFor(path);
  std::string blob;
  nlohmann::ordered_json layer_list = nlohmann::ordered_json::array();
  auto put = [&blob](const std::vector<float>& v) {
    for (float f : v) AppendF32(blob, f);
  };
  for (const Layer& layer : bundle.layers()) {
    nlohmann::ordered_json j;
    j["type"] = layer_type_name(layer);
    std::visit(
        Overloaded{
            [&](const layers::Conv2D& c) {
              j["out_ch"] = c.out_ch;
              j["in_ch"] = c.in_ch;
              j["kernel"] = {c.kh, c.kw};
              j["stride"] = c.stride;
              j["pad"] = c.pad;
              j["tensors"] = {TensorEntry("weight", {c.out_ch, c.in_ch, c.kh, c.kw}),
                              TensorEntry("bias", {c.out_ch})};
              put(c.weight);
              put(c.bias);
            },
            [&](const layers::MaxPool& p) {
              j["kernel"] = p.k;
              j["stride"] = p.stride;
            },
            [&](const layers::Dense& d) {
              j["out"] = d.out;
              j["in"] = d.in;
              j["tensors"] = {TensorEntry("weight", {d.out, d.in}),
                              TensorEntry("bias", {d.out})};
              put(d.weight);
              put(d.bias);
            },
            [&](const layers::LSTM& l) {
              j["hidden"] = l.hidden;
              j["input"] = l.input;
              j["tensors"] = {TensorEntry("w_ih", {4 * l.hidden, l.input}),
                              TensorEntry("w_hh", {4 * l.hidden, l.hidden}),
                              TensorEntry("b_ih", {4 * l.hidden}),
                              TensorEntry("b_hh", {4 * l.hidden})};
              put(l.w_ih);
              put(l.w_hh);
              put(l.b_ih);
              put(l.b_hh);
            },
            [](const auto&) {},
        },
        layer);
    layer_list.push_back(std::move(j));
  }

  nlohmann::ordered_json m;
  m["format"] = kBundleFormat;
  m["version"] = 1;
  m["dtype"] = "float32";
  m["byte_order"] = "little";
  m["input_shape"] = bundle.input_shape();
  m["input_scale"] = bundle.input_scale();
  m["output"] = bundle.output() == OutputTag::kWindKt ? "wind_kt" : "feature_vec";
  m["blob"] = blob_path.filename().string();
  m["blob_sha256"] = sha256_hex(blob);
  m["layers"] = std::move(layer_list);

  std::ofstream bin(blob_path, std::ios::binary | std::ios::trunc);
  if (!bin) throw FormatError("cannot write " + blob_path.string());
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream js(path, std::ios::trunc);
  if (!js) throw FormatError("cannot write " + path.string());
  js << m.dump(2) << "\n";
}

WeightBundle read_bundle(const std::filesystem::path& path) {
  nlohmann::json m;
  {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
      m = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  try {
    if (m.at("format").get<std::string>() != kBundleFormat ||
        m.at("version").get<int>() != 1 ||
        m.at("dtype").get<std::string>() != "float32" ||
        m.value("byte_order", "little") != "little") {
      throw FormatError(path.string() + ": unsupported bundle format");
    }
    auto blob_path = BlobPathFor(path);
    if (m.contains("blob")) {
      blob_path = path.parent_path() / m["blob"].get<std::string>();
    }
    const std::string blob = ReadAll(blob_path);
    if (m.contains("blob_sha256") &&
        m["blob_sha256"].get<std::string>() != sha256_hex(blob)) {
      throw FormatError(blob_path.string() + ": sha256 mismatch");
    }

    std::size_t offset = 0;
    auto take = [&](const nlohmann::json& entry, const char* name,
                    const Shape& expected, int index) {
      if (entry.at("name").get<std::string>() != name) {
        throw FormatError("layer " + std::to_string(index) + ": expected tensor '" +
                          name + "'");
      }
      const Shape shape = entry.at("shape").get<Shape>();
      if (shape != expected) {
        throw ShapeError(index, std::string("tensor ") + name + " has shape " +
                                    shape_to_string(shape) + ", expected " +
                                    shape_to_string(expected));
      }
      const std::size_t n = shape_elements(shape);
      if (offset + 4 * n > blob.size()) {
        throw FormatError(blob_path.string() + ": blob too short");
      }
      std::vector<float> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = LoadF32(blob, offset + 4 * i);
      offset += 4 * n;
      return v;
    };

    std::vector<Layer> out_layers;
    const auto& jl = m.at("layers");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const auto& j = jl[i];
      const int idx = static_cast<int>(i);
      const std::string type = j.at("type").get<std::string>();
      const auto tensors = j.value("tensors", nlohmann::json::array());
      auto tensor_at = [&](std::size_t k) -> const nlohmann::json& {
        if (k >= tensors.size()) {
          throw FormatError("layer " + std::to_string(idx) + ": missing tensors");
        }
        return tensors[k];
      };
      if (type == "conv2d") {
        layers::Conv2D c;
        c.out_ch = j.at("out_ch").get<int>();
        c.in_ch = j.at("in_ch").get<int>();
        const auto k = j.at("kernel").get<std::vector<int>>();
        if (k.size() != 2) throw FormatError("conv2d kernel needs [kh, kw]");
        c.kh = k[0];
        c.kw = k[1];
        c.stride = j.value("stride", 1);
        c.pad = j.value("pad", 0);
        c.weight = take(tensor_at(0), "weight", {c.out_ch, c.in_ch, c.kh, c.kw}, idx);
        c.bias = take(tensor_at(1), "bias", {c.out_ch}, idx);
        out_layers.emplace_back(std::move(c));
      } else if (type == "relu") {
        out_layers.emplace_back(layers::ReLU{});
      } else if (type == "maxpool") {
        layers::MaxPool p;
        p.k = j.at("kernel").get<int>();
        p.stride = j.value("stride", p.k);
        out_layers.emplace_back(p);
      } else if (type == "flatten") {
        out_layers.emplace_back(layers::Flatten{});
      } else if (type == "dense") {
        layers::Dense d;
        d.out = j.at("out").get<int>();
        d.in = j.at("in").get<int>();
        d.weight = take(tensor_at(0), "weight", {d.out, d.in}, idx);
        d.bias = take(tensor_at(1), "bias", {d.out}, idx);
        out_layers.emplace_back(std::move(d));
      } else if (type == "lstm") {
        layers::LSTM l;
        l.hidden = j.at("hidden").get<int>();
        l.input = j.at("input").get<int>();
        l.w_ih = take(tensor_at(0), "w_ih", {4 * l.hidden, l.input}, idx);
        l.w_hh = take(tensor_at(1), "w_hh", {4 * l.hidden, l.hidden}, idx);
        l.b_ih = take(tensor_at(2), "b_ih", {4 * l.hidden}, idx);
        l.b_hh = take(tensor_at(3), "b_hh", {4 * l.hidden}, idx);
        out_layers.emplace_back(std::move(l));
      } else {
        throw FormatError("layer " + std::to_string(idx) + ": unknown type '" +
                          type + "'");
      }
    }
    if (offset != blob.size()) {
      throw FormatError(blob_path.string() + ": " +
                        std::to_string(blob.size() - offset) +
                        " trailing bytes in blob");
    }
    const std::string tag = m.at("output").get<std::string>();
    OutputTag output;
    if (tag == "wind_kt") {
      output = OutputTag::kWindKt;
    } else if (tag == "feature_vec") {
      output = OutputTag::kFeatureVec;
    } else {
      throw FormatError("unknown output tag '" + tag + "'");
    }
    return WeightBundle(m.at("input_shape").get<Shape>(), std::move(out_layers),
                        output, m.value("input_scale", 1.0f / 255.0f));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---- Intensity series --------------------------------------------------------

void IntensitySeries::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].wind_kt >= 0.0)) {
      throw InvalidArgument("intensity series contains a negative wind");
    }
    if (i > 0 && !(samples[i].timestamp > samples[i - 1].timestamp)) {
      throw InvalidArgument("intensity series timestamps must increase");
    }
  }
}

IntensitySeries smooth(const IntensitySeries& series, int window) {
  if (window < 1) throw InvalidArgument("smoothing window must be >= 1");
  IntensitySeries out;
  out.samples.reserve(series.samples.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
    double sum = 0.0;
    double lo = series.samples[i].wind_kt;
    double hi = lo;
    for (std::size_t k = first; k <= i; ++k) {
      const double v = series.samples[k].wind_kt;
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // The clamp only absorbs rounding; the exact mean lies in [lo, hi].
    const double mean = sum / static_cast<double>(i + 1 - first);
    out.samples.push_back({series.samples[i].timestamp, std::clamp(mean, lo, hi)});
  }
  return out;
}

}  // namespace cyclotrack
