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
#ifndef CYCLOTRACK_INFER_HPP_
#define CYCLOTRACK_INFER_HPP_

// Detector and intensity backends: the reference cold-blob detector, the
// native forward executor for small exported networks, and smoothing of
// intensity series.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cyclotrack/ingest.hpp"
#include "cyclotrack/tensor.hpp"
#include "cyclotrack/time.hpp"

namespace cyclotrack {

// ---- Detections --------------------------------------------------------------

// Box in basin-image pixel space; (cx, cy) is the predicted cyclone centre.
struct Detection {
  int class_id = 0;
  double confidence = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual std::vector<Detection> detect(const GrayImage& image) const = 0;
};

struct BlobDetectorParams {
  std::uint8_t threshold = 45;
  int min_area_px = 50;
  // Area at which confidence saturates at 1.
  double saturation_area_px = 10000.0;
};

// 4-connected components of pixels >= threshold. Centre is the
// intensity-weighted centroid of pixel centres, box the bounding box,
// confidence min(1, area / saturation_area). Sorted by confidence, then
// area, descending. class_id is always 0.
std::vector<Detection> blob_detect(const GrayImage& image,
                                   const BlobDetectorParams& params = {});

class BlobDetector final : public DetectorBackend {
 public:
  explicit BlobDetector(BlobDetectorParams params = {}) : params_(params) {}
  std::vector<Detection> detect(const GrayImage& image) const override {
    return blob_detect(image, params_);
  }

 private:
  BlobDetectorParams params_;
};

// ---- Weight bundles ----------------------------------------------------------

namespace layers {

// Weight layout [out_ch][in_ch][kh][kw].
struct Conv2D {
  int out_ch = 0;
  int in_ch = 0;
  int kh = 0;
  int kw = 0;
  int stride = 1;
  int pad = 0;
  std::vector<float> weight;
  std::vector<float> bias;
};

struct ReLU {};

struct MaxPool {
  int k = 2;
  int stride = 2;
};

struct Flatten {};

// Weight layout [out][in].
struct Dense {
  int out = 0;
  int in = 0;
  std::vector<float> weight;
  std::vector<float> bias;
};

// Gate blocks stacked in the order input, forget, cell, output:
// w_ih [4*hidden][input], w_hh [4*hidden][hidden], biases [4*hidden].
// Consumes a [T][input] sequence from zero state and emits the final
// hidden state.
struct LSTM {
  int hidden = 0;
  int input = 0;
  std::vector<float> w_ih;
  std::vector<float> w_hh;
  std::vector<float> b_ih;
  std::vector<float> b_hh;
};

}  // namespace layers

using Layer = std::variant<layers::Conv2D, layers::ReLU, layers::MaxPool,
                           layers::Flatten, layers::Dense, layers::LSTM>;

std::string layer_type_name(const Layer& layer);

enum class OutputTag { kWindKt, kFeatureVec };

// An immutable, audited network description.
//
// Without an LSTM layer the whole input ([C,H,W] or [N]) flows through the
// layer list. With one, the input carries a leading sequence axis: layers
// before the LSTM run per frame and must end 1-D, the LSTM folds the
// frames, and any later layers act on its final hidden state.
class WeightBundle {
 public:
  // Runs the shape audit; throws ShapeError naming the first bad layer and
  // FormatError for non-finite weights.
  WeightBundle(Shape input_shape, std::vector<Layer> layers, OutputTag output,
               float input_scale = 1.0f / 255.0f);

  const Shape& input_shape() const noexcept { return input_shape_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  OutputTag output() const noexcept { return output_; }
  float input_scale() const noexcept { return input_scale_; }
  const Shape& output_shape() const noexcept { return output_shape_; }

  bool is_sequence() const noexcept { return lstm_index_ >= 0; }
  int lstm_index() const noexcept { return lstm_index_; }
  // Frames consumed per call: the leading axis for sequence bundles, else 1.
  int sequence_length() const noexcept;

 private:
  Shape input_shape_;
  std::vector<Layer> layers_;
  OutputTag output_;
  float input_scale_;
  Shape output_shape_;
  int lstm_index_ = -1;
};

// Output shape of a single layer given its input shape; throws ShapeError
// tagged with `index`. Conv: floor((n + 2p - k) / s) + 1; pool: valid
// windows only.
Shape layer_output_shape(const Layer& layer, const Shape& in, int index);

// Files: `<stem>.wb.json` manifest + `<stem>.wb.bin` blob of little-endian
// float32 tensors in manifest order. `path` names the .wb.json file.
void write_bundle(const WeightBundle& bundle,
                  const std::filesystem::path& path);
WeightBundle read_bundle(const std::filesystem::path& path);

// Deterministic forward pass; throws ShapeError(-1) when `input` does not
// match the declared input shape.
Tensor forward(const WeightBundle& bundle, const Tensor& input);

// Stacks crops (scaled by the bundle's input_scale) into the declared input
// and runs the network; the single output is clamped to [0, 200] kt.
double estimate_intensity(const WeightBundle& bundle,
                          std::span<const GrayImage> crops);

// ---- Intensity backends ------------------------------------------------------

class IntensityBackend {
 public:
  virtual ~IntensityBackend() = default;
  // Frames ordered oldest to newest.
  virtual int sequence_length() const = 0;
  virtual double estimate(std::span<const GrayImage> crops) const = 0;
};

class BundleIntensityBackend final : public IntensityBackend {
 public:
  explicit BundleIntensityBackend(WeightBundle bundle)
      : bundle_(std::move(bundle)) {}
  int sequence_length() const override { return bundle_.sequence_length(); }
  double estimate(std::span<const GrayImage> crops) const override {
    return estimate_intensity(bundle_, crops);
  }

 private:
  WeightBundle bundle_;
};

// Reference estimator: reads the coldest temperature in the central
// `core_px` square of the newest crop and inverts
// depth = kelvin_per_kt * wind below `background_k`.
struct ColdCoreParams {
  int core_px = 60;
  double background_k = 295.0;
  double kelvin_per_kt = 0.8;
};

class ColdCoreIntensityBackend final : public IntensityBackend {
 public:
  explicit ColdCoreIntensityBackend(ColdCoreParams params = {})
      : params_(params) {}
  int sequence_length() const override { return 1; }
  double estimate(std::span<const GrayImage> crops) const override;

 private:
  ColdCoreParams params_;
};

// ---- Intensity series --------------------------------------------------------

struct IntensitySample {
  Instant timestamp;
  double wind_kt = 0.0;
};

struct IntensitySeries {
  std::vector<IntensitySample> samples;

  // Throws InvalidArgument unless timestamps increase strictly and winds
  // are non-negative.
  void validate() const;
};

// Trailing mean over the latest min(window, i + 1) samples.
IntensitySeries smooth(const IntensitySeries& series, int window = 6);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_INFER_HPP_
