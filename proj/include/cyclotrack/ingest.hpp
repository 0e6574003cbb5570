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
#ifndef CYCLOTRACK_INGEST_HPP_
#define CYCLOTRACK_INGEST_HPP_

// Brightness-temperature granules on regular lat/lon grids, basin window
// extraction, cyclone-centric crops and geographic <-> pixel conversion.
//
// Pixel convention: continuous coordinates with the origin at the NW corner
// of the grid, x growing east and y growing south. Integer pixel (row i,
// col j) covers [j, j+1) x [i, i+1).

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cyclotrack/error.hpp"
#include "cyclotrack/geodesy.hpp"
#include "cyclotrack/time.hpp"

namespace cyclotrack {

// Dense row-major 2-D array.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int rows, int cols, T fill = T{})
      : rows_(rows),
        cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
              fill) {
    if (rows < 0 || cols < 0) throw InvalidArgument("negative raster size");
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

struct PixelCoord {
  double x = 0.0;  // columns east of the west edge
  double y = 0.0;  // rows south of the north edge
};

class GridSpec {
 public:
  GridSpec() = default;
  // Throws InvalidArgument when the bounds or counts are degenerate.
  GridSpec(double lat_north, double lat_south, double lon_west,
           double lon_east, int rows, int cols);

  double lat_north() const noexcept { return lat_north_; }
  double lat_south() const noexcept { return lat_south_; }
  double lon_west() const noexcept { return lon_west_; }
  double lon_east() const noexcept { return lon_east_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  double lat_span() const noexcept { return lat_north_ - lat_south_; }
  double lon_span() const noexcept { return lon_east_ - lon_west_; }
  double deg_per_row() const noexcept { return lat_span() / rows_; }
  double deg_per_col() const noexcept { return lon_span() / cols_; }

  bool contains(LatLon p) const noexcept;
  // True when `other`'s bounding box lies inside this grid's.
  bool covers(const GridSpec& other) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double lat_north_ = 1.0;
  double lat_south_ = 0.0;
  double lon_west_ = 0.0;
  double lon_east_ = 1.0;
  int rows_ = 1;
  int cols_ = 1;
};

enum class Basin { kArabianSea, kBayOfBengal };

inline constexpr int kBasinImageSize = 1035;

// AS: 0-35 N, 45-82.2 E. BOB: 0-35 N, 75-112.2 E. Both 1035 x 1035.
GridSpec basin_grid(Basin basin);
std::string_view basin_name(Basin basin);  // "AS" / "BOB"
Basin parse_basin(std::string_view name);  // throws FormatError

// Sanity bounds on stored brightness temperatures.
inline constexpr double kMinPlausibleBtK = 150.0;
inline constexpr double kMaxPlausibleBtK = 350.0;

struct Granule {
  GridSpec grid;
  Raster<float> bt;  // Kelvin
  Instant timestamp;

  // Throws FormatError on dimension mismatch or out-of-bound temperatures.
  void validate() const;
};

struct GrayImage {
  GridSpec grid;
  Raster<std::uint8_t> pixels;
};

// Linear map of [180 K, 310 K] onto [255, 0]: cold cloud tops are bright.
inline constexpr double kNormColdK = 180.0;
inline constexpr double kNormWarmK = 310.0;

std::uint8_t normalize_temperature(double kelvin);
GrayImage normalize_bt(const Granule& granule);
// Inverse of normalize_temperature at bin centres.
double gray_to_temperature(std::uint8_t gray);

// Both throw OutOfGridError outside the grid (1e-9 tolerance on edges).
PixelCoord latlon_to_pixel(const GridSpec& grid, LatLon p);
LatLon pixel_to_latlon(const GridSpec& grid, PixelCoord px);

// Integer (row, col) of the cell containing a continuous coordinate, clamped
// into the raster so that the south/east edges map to the last cell.
struct PixelIndex {
  int row = 0;
  int col = 0;
};
PixelIndex containing_pixel(const GridSpec& grid, PixelCoord px);

// Resampling seam: regular-grid granules use nearest neighbour resampling;
// a satellite-projection reader would plug in another implementation.
class Resampler {
 public:
  virtual ~Resampler() = default;
  // Throws CoverageError if `source` does not cover `target`.
  virtual Granule resample(const Granule& source,
                           const GridSpec& target) const = 0;
};

// Each target cell takes the source cell containing the target cell centre.
class NearestNeighborResampler final : public Resampler {
 public:
  Granule resample(const Granule& source,
                   const GridSpec& target) const override;
};

GrayImage extract_basin(const Granule& granule, Basin basin);
GrayImage extract_basin(const Granule& granule, Basin basin,
                        const Resampler& resampler);

struct Crop {
  GrayImage image;
  bool padded = false;  // true when part of the window fell off the source
};

// Square crop of side `size_px` around the pixel containing `center`.
// Cells outside the source are 0. Throws OutOfGridError / InvalidArgument.
Crop crop_centered(const GrayImage& image, LatLon center, int size_px);

// Granule container: `<base>.btg` holds big-endian u16 centi-Kelvin values
// row-major; `<base>.btg.json` holds the grid, timestamp and units ("cK").
// `path` names the .btg file.
void write_granule(const Granule& granule, const std::filesystem::path& path);
Granule read_granule(const std::filesystem::path& path);
// Header only; cheap timestamp scans over a directory.
Instant read_granule_timestamp(const std::filesystem::path& path);

// 8-bit binary PGM (P5).
void write_pgm(const Raster<std::uint8_t>& pixels,
               const std::filesystem::path& path);
Raster<std::uint8_t> read_pgm(const std::filesystem::path& path);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_INGEST_HPP_
