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
#ifndef CYCLOTRACK_TENSOR_HPP_
#define CYCLOTRACK_TENSOR_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cyclotrack/error.hpp"

namespace cyclotrack {

using Shape = std::vector<int>;

inline std::size_t shape_elements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t acc, int d) {
                           return acc * static_cast<std::size_t>(d < 0 ? 0 : d);
                         });
}

std::string shape_to_string(const Shape& shape);

// Row-major float32 tensor.
struct Tensor {
  Shape shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(Shape s, float fill = 0.0f)
      : shape(std::move(s)), data(shape_elements(shape), fill) {}
  Tensor(Shape s, std::vector<float> values)
      : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_elements(shape)) {
      throw InvalidArgument("tensor data does not match shape " +
                            shape_to_string(shape));
    }
  }

  std::size_t size() const noexcept { return data.size(); }
  int rank() const noexcept { return static_cast<int>(shape.size()); }
};

// `.t32` fixture file: magic "T32\0", u32 rank, rank x u32 dims, then the
// row-major values. All integers and floats little-endian.
void write_t32(const Tensor& t, const std::filesystem::path& path);
Tensor read_t32(const std::filesystem::path& path);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_TENSOR_HPP_
