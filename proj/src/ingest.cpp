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
#include "cyclotrack/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace cyclotrack {
namespace {

constexpr double kEdgeTolDeg = 1e-9;
constexpr double kEdgeTolPx = 1e-9;

std::string Describe(LatLon p) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << p.lat << ", " << p.lon << ")";
  return os.str();
}

}  // namespace

GridSpec::GridSpec(double lat_north, double lat_south, double lon_west,
                   double lon_east, int rows, int cols)
    : lat_north_(lat_north),
      lat_south_(lat_south),
      lon_west_(lon_west),
      lon_east_(lon_east),
      rows_(rows),
      cols_(cols) {
  if (!std::isfinite(lat_north) || !std::isfinite(lat_south) ||
      !std::isfinite(lon_west) || !std::isfinite(lon_east)) {
    throw InvalidArgument("grid bounds must be finite");
  }
  if (!(lat_north > lat_south)) {
    throw InvalidArgument("grid requires lat_north > lat_south");
  }
  if (!(lon_east > lon_west)) {
    throw InvalidArgument("grid requires lon_east > lon_west");
  }
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("grid requires rows >= 1 and cols >= 1");
  }
}

bool GridSpec::contains(LatLon p) const noexcept {
  return p.lat >= lat_south_ - kEdgeTolDeg &&
         p.lat <= lat_north_ + kEdgeTolDeg &&
         p.lon >= lon_west_ - kEdgeTolDeg && p.lon <= lon_east_ + kEdgeTolDeg;
}

bool GridSpec::covers(const GridSpec& other) const noexcept {
  return other.lat_north_ <= lat_north_ + kEdgeTolDeg &&
         other.lat_south_ >= lat_south_ - kEdgeTolDeg &&
         other.lon_west_ >= lon_west_ - kEdgeTolDeg &&
         other.lon_east_ <= lon_east_ + kEdgeTolDeg;
}

GridSpec basin_grid(Basin basin) {
  switch (basin) {
    case Basin::kArabianSea:
      return GridSpec(35.0, 0.0, 45.0, 82.2, kBasinImageSize,
                      kBasinImageSize);
    case Basin::kBayOfBengal:
      return GridSpec(35.0, 0.0, 75.0, 112.2, kBasinImageSize,
                      kBasinImageSize);
  }
  throw InvalidArgument("unknown basin");
}

std::string_view basin_name(Basin basin) {
  return basin == Basin::kArabianSea ? "AS" : "BOB";
}

Basin parse_basin(std::string_view name) {
  if (name == "AS") return Basin::kArabianSea;
  if (name == "BOB") return Basin::kBayOfBengal;
  throw FormatError("unknown basin '" + std::string(name) + "'");
}

void Granule::validate() const {
  if (bt.rows() != grid.rows() || bt.cols() != grid.cols()) {
    throw FormatError("granule matrix does not match its grid");
  }
  for (float v : bt.data()) {
    if (!std::isfinite(v) || v < kMinPlausibleBtK || v > kMaxPlausibleBtK) {
      throw FormatError("granule brightness temperature out of bounds: " +
                        std::to_string(v));
    }
  }
}

std::uint8_t normalize_temperature(double kelvin) {
  const double g =
      std::round(255.0 * (kNormWarmK - kelvin) / (kNormWarmK - kNormColdK));
  return static_cast<std::uint8_t>(std::clamp(g, 0.0, 255.0));
}

double gray_to_temperature(std::uint8_t gray) {
  return kNormWarmK - static_cast<double>(gray) * (kNormWarmK - kNormColdK) /
                          255.0;
}

GrayImage normalize_bt(const Granule& granule) {
  GrayImage out{granule.grid, Raster<std::uint8_t>(granule.bt.rows(),
                                                   granule.bt.cols())};
  std::transform(granule.bt.data().begin(), granule.bt.data().end(),
                 out.pixels.data().begin(),
                 [](float t) { return normalize_temperature(t); });
  return out;
}

PixelCoord latlon_to_pixel(const GridSpec& grid, LatLon p) {
  if (!grid.contains(p)) {
    throw OutOfGridError("position " + Describe(p) + " outside grid");
  }
  return {(p.lon - grid.lon_west()) * grid.cols() / grid.lon_span(),
          (grid.lat_north() - p.lat) * grid.rows() / grid.lat_span()};
}

LatLon pixel_to_latlon(const GridSpec& grid, PixelCoord px) {
  if (!(px.x >= -kEdgeTolPx && px.x <= grid.cols() + kEdgeTolPx &&
        px.y >= -kEdgeTolPx && px.y <= grid.rows() + kEdgeTolPx)) {
    throw OutOfGridError("pixel outside grid");
  }
  return {grid.lat_north() - px.y * grid.lat_span() / grid.rows(),
          grid.lon_west() + px.x * grid.lon_span() / grid.cols()};
}

PixelIndex containing_pixel(const GridSpec& grid, PixelCoord px) {
  // The nudge sends points that sit on a cell boundary (up to rounding
  // noise) into the east/south cell, matching the half-open convention.
  const int col = static_cast<int>(std::floor(px.x + kEdgeTolPx));
  const int row = static_cast<int>(std::floor(px.y + kEdgeTolPx));
  return {std::clamp(row, 0, grid.rows() - 1),
          std::clamp(col, 0, grid.cols() - 1)};
}

Granule NearestNeighborResampler::resample(const Granule& source,
                                           const GridSpec& target) const {
  if (!source.grid.covers(target)) {
    throw CoverageError("granule grid does not cover the requested window");
  }
  // Regular grids make the mapping separable.
  std::vector<int> col_map(static_cast<std::size_t>(target.cols()));
  for (int j = 0; j < target.cols(); ++j) {
    const double lon =
        target.lon_west() + (j + 0.5) * target.lon_span() / target.cols();
    const double x =
        (lon - source.grid.lon_west()) * source.grid.cols() /
        source.grid.lon_span();
    col_map[static_cast<std::size_t>(j)] =
        containing_pixel(source.grid, {x, 0.0}).col;
  }
  std::vector<int> row_map(static_cast<std::size_t>(target.rows()));
  for (int i = 0; i < target.rows(); ++i) {
    const double lat =
        target.lat_north() - (i + 0.5) * target.lat_span() / target.rows();
    const double y = (source.grid.lat_north() - lat) * source.grid.rows() /
                     source.grid.lat_span();
    row_map[static_cast<std::size_t>(i)] =
        containing_pixel(source.grid, {0.0, y}).row;
  }

  Granule out{target, Raster<float>(target.rows(), target.cols()),
              source.timestamp};
  for (int i = 0; i < target.rows(); ++i) {
    const int si = row_map[static_cast<std::size_t>(i)];
    for (int j = 0; j < target.cols(); ++j) {
      out.bt(i, j) = source.bt(si, col_map[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

GrayImage extract_basin(const Granule& granule, Basin basin) {
  return extract_basin(granule, basin, NearestNeighborResampler{});
}

GrayImage extract_basin(const Granule& granule, Basin basin,
                        const Resampler& resampler) {
  const GridSpec window = basin_grid(basin);
  if (granule.grid == window) return normalize_bt(granule);
  return normalize_bt(resampler.resample(granule, window));
}

Crop crop_centered(const GrayImage& image, LatLon center, int size_px) {
  if (size_px < 1) throw InvalidArgument("crop size must be >= 1");
  const GridSpec& g = image.grid;
  const PixelIndex c = containing_pixel(g, latlon_to_pixel(g, center));
  const int top = c.row - size_px / 2;
  const int left = c.col - size_px / 2;

  const double dlat = g.deg_per_row();
  const double dlon = g.deg_per_col();
  GridSpec crop_grid(g.lat_north() - top * dlat,
                     g.lat_north() - (top + size_px) * dlat,
                     g.lon_west() + left * dlon,
                     g.lon_west() + (left + size_px) * dlon, size_px, size_px);

  Crop out{{crop_grid, Raster<std::uint8_t>(size_px, size_px, 0)}, false};
  for (int i = 0; i < size_px; ++i) {
    const int si = top + i;
    for (int j = 0; j < size_px; ++j) {
      const int sj = left + j;
      if (si < 0 || si >= g.rows() || sj < 0 || sj >= g.cols()) {
        out.padded = true;
        continue;
      }
      out.image.pixels(i, j) = image.pixels(si, sj);
    }
  }
  return out;
}

// ---- Granule container ------------------------------------------------------

namespace {

std::filesystem::path HeaderPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

nlohmann::json ReadHeader(const std::filesystem::path& path) {
  std::ifstream in(HeaderPath(path));
  if (!in) throw FormatError("cannot open " + HeaderPath(path).string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(HeaderPath(path).string() + ": " + e.what());
  }
}

GridSpec GridFromJson(const nlohmann::json& j) {
  try {
    return GridSpec(j.at("lat_north").get<double>(),
                    j.at("lat_south").get<double>(),
                    j.at("lon_west").get<double>(),
                    j.at("lon_east").get<double>(), j.at("rows").get<int>(),
                    j.at("cols").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad grid header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("bad grid header: ") + e.what());
  }
}

}  // namespace

void write_granule(const Granule& granule, const std::filesystem::path& path) {
  granule.validate();
  const GridSpec& g = granule.grid;
  nlohmann::ordered_json header;
  header["grid"] = {{"lat_north", g.lat_north()}, {"lat_south", g.lat_south()},
                    {"lon_west", g.lon_west()},   {"lon_east", g.lon_east()},
                    {"rows", g.rows()},           {"cols", g.cols()}};
  header["timestamp"] = format_iso8601(granule.timestamp);
  header["units"] = "cK";

  std::string blob;
  blob.reserve(granule.bt.size() * 2);
  for (float t : granule.bt.data()) {
    const auto ck = static_cast<std::uint16_t>(
        std::clamp(std::lround(static_cast<double>(t) * 100.0), 0L, 65535L));
    blob.push_back(static_cast<char>(ck >> 8));
    blob.push_back(static_cast<char>(ck & 0xFF));
  }
  std::ofstream bin(path, std::ios::binary | std::ios::trunc);
  if (!bin) throw FormatError("cannot write " + path.string());
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream js(HeaderPath(path), std::ios::trunc);
  if (!js) throw FormatError("cannot write " + HeaderPath(path).string());
  js << header.dump(2) << "\n";
}

Instant read_granule_timestamp(const std::filesystem::path& path) {
  const nlohmann::json header = ReadHeader(path);
  if (!header.contains("timestamp") || !header["timestamp"].is_string()) {
    throw FormatError(path.string() + ": header lacks timestamp");
  }
  return parse_iso8601(header["timestamp"].get<std::string>());
}

Granule read_granule(const std::filesystem::path& path) {
  const nlohmann::json header = ReadHeader(path);
  if (header.value("units", "") != "cK") {
    throw FormatError(path.string() + ": unsupported units");
  }
  if (!header.contains("grid")) throw FormatError("header lacks grid");
  Granule out;
  out.grid = GridFromJson(header["grid"]);
  out.timestamp = read_granule_timestamp(path);

  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw FormatError("cannot open " + path.string());
  const std::string blob((std::istreambuf_iterator<char>(bin)),
                         std::istreambuf_iterator<char>());
  const std::size_t n = static_cast<std::size_t>(out.grid.rows()) *
                        static_cast<std::size_t>(out.grid.cols());
  if (blob.size() != 2 * n) {
    throw FormatError(path.string() + ": expected " + std::to_string(2 * n) +
                      " bytes, found " + std::to_string(blob.size()));
  }
  out.bt = Raster<float>(out.grid.rows(), out.grid.cols());
  auto& data = out.bt.data();
  for (std::size_t k = 0; k < n; ++k) {
    const auto hi = static_cast<unsigned char>(blob[2 * k]);
    const auto lo = static_cast<unsigned char>(blob[2 * k + 1]);
    data[k] = static_cast<float>(((hi << 8) | lo) / 100.0);
  }
  out.validate();
  return out;
}

void write_pgm(const Raster<std::uint8_t>& pixels,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << pixels.cols() << " " << pixels.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data().data()),
            static_cast<std::streamsize>(pixels.size()));
}

Raster<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  auto next_token = [&in]() {
    std::string tok;
    while (in) {
      const int ch = in.peek();
      if (ch == '#') {
        std::string ignored;
        std::getline(in, ignored);
      } else if (std::isspace(ch)) {
        in.get();
      } else {
        break;
      }
    }
    in >> tok;
    return tok;
  };
  if (next_token() != "P5") throw FormatError(path.string() + ": not P5");
  int cols = 0, rows = 0, maxval = 0;
  try {
    cols = std::stoi(next_token());
    rows = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad PGM header");
  }
  if (maxval != 255 || cols <= 0 || rows <= 0) {
    throw FormatError(path.string() + ": unsupported PGM");
  }
  in.get();  // single whitespace before the raster
  Raster<std::uint8_t> out(rows, cols);
  in.read(reinterpret_cast<char*>(out.data().data()),
          static_cast<std::streamsize>(out.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.size())) {
    throw FormatError(path.string() + ": truncated PGM");
  }
  return out;
}

}  // namespace cyclotrack
