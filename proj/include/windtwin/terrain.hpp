#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace windtwin {

// Row-major elevation raster; row 0 is the northernmost row, as in ESRI
// ASCII grids. Missing cells (water, unmeasured) are nullopt.
struct HeightGrid {
  double origin_x = 0.0;  // xllcorner
  double origin_y = 0.0;  // yllcorner
  double cell_size = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::optional<double>> values;

  std::optional<double>& at(std::size_t row, std::size_t col) {
    return values[row * width + col];
  }
  const std::optional<double>& at(std::size_t row, std::size_t col) const {
    return values[row * width + col];
  }
  // Cell centre in world coordinates.
  double cell_x(std::size_t col) const { return origin_x + (static_cast<double>(col) + 0.5) * cell_size; }
  double cell_y(std::size_t row) const {
    return origin_y + (static_cast<double>(height - 1 - row) + 0.5) * cell_size;
  }
};

struct DepthContour {
  double depth = 0.0;  // m, <= 0
  std::vector<std::pair<double, double>> vertices;
};

HeightGrid load_height_grid(const std::filesystem::path& path);
void save_height_grid(const HeightGrid& grid, const std::filesystem::path& path);

// Contour CSV: `depth,x,y,polyline_id`, depth <= 0, >= 2 vertices per line.
std::vector<DepthContour> load_contours(const std::filesystem::path& path);

struct MergeOptions {
  double search_radius = 5000.0;  // m
  int k_nearest = 8;
};

// Fills every missing cell by inverse-distance weighting over the nearest
// contour vertices, clamped to <= 0. Onshore cells are never altered.
// Throws when a missing cell has no contour vertex within the radius.
HeightGrid merge_bathymetry(const HeightGrid& grid, const std::vector<DepthContour>& contours,
                            const MergeOptions& options = {});

struct QuantizedChunkSet {
  double scale = 0.1;   // m per count
  double offset = 0.0;  // m, midpoint of the source grid range
  std::size_t grid_width = 0, grid_height = 0;  // original extent
  double origin_x = 0.0, origin_y = 0.0, cell_size = 1.0;
  std::vector<std::int16_t> counts;  // row-major, original extent

  // filled by chunk_split
  std::size_t chunk_size = 0;  // 0 = not yet chunked
  std::size_t padded_width = 0, padded_height = 0;
  std::size_t chunks_x = 0, chunks_y = 0;
  std::vector<std::vector<std::int16_t>> chunks;  // row-major tiles, row-major order
};

// count = round((value - offset)/scale) with offset at the grid range
// midpoint, so the dequantization error is <= scale/2 everywhere. The grid
// must have no missing cells. Throws with the minimum workable scale when
// the range does not fit int16.
QuantizedChunkSet quantize_int16(const HeightGrid& grid, double scale);

// Pads to a multiple of chunk_size by edge replication and tiles.
void chunk_split(QuantizedChunkSet& set, std::size_t chunk_size);

// Counts on the original extent, recovered from the tiles; bit-exact
// inverse of chunk_split.
std::vector<std::int16_t> reassemble_counts(const QuantizedChunkSet& set);

// Dequantized grid on the original extent.
HeightGrid chunk_reassemble(const QuantizedChunkSet& set);

// One little-endian int16 binary file per chunk plus a JSON sidecar.
void save_chunk_set(const QuantizedChunkSet& set, const std::filesystem::path& dir);
QuantizedChunkSet load_chunk_set(const std::filesystem::path& dir);

}  // namespace windtwin
