#include "windtwin/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

using nlohmann::json;

namespace {
constexpr double kNoData = -99999.0;
}

HeightGrid load_height_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open height grid " + path.string());
  HeightGrid g;
  double nodata = kNoData;
  std::size_t ncols = 0, nrows = 0;
  // ESRI ASCII header: six `key value` lines, then row-major values north
  // to south.
  for (int i = 0; i < 6; ++i) {
    std::string key;
    double value = 0.0;
    if (!(in >> key >> value)) throw FormatError("height grid " + path.string() + ": bad header");
    std::transform(key.begin(), key.end(), key.begin(), ::tolower);
    if (key == "ncols") {
      ncols = static_cast<std::size_t>(value);
    } else if (key == "nrows") {
      nrows = static_cast<std::size_t>(value);
    } else if (key == "xllcorner") {
      g.origin_x = value;
    } else if (key == "yllcorner") {
      g.origin_y = value;
    } else if (key == "cellsize") {
      g.cell_size = value;
    } else if (key == "nodata_value") {
      nodata = value;
    } else {
      throw FormatError("height grid " + path.string() + ": unknown header key '" + key + "'");
    }
  }
  if (ncols == 0 || nrows == 0 || g.cell_size <= 0.0) {
    throw ValidationError("height grid " + path.string() + ": bad dimensions");
  }
  g.width = ncols;
  g.height = nrows;
  g.values.resize(ncols * nrows);
  for (std::size_t i = 0; i < ncols * nrows; ++i) {
    double v = 0.0;
    if (!(in >> v)) {
      throw FormatError("height grid " + path.string() + ": truncated at value " +
                        std::to_string(i));
    }
    g.values[i] = (v == nodata) ? std::nullopt : std::optional<double>(v);
  }
  return g;
}

void save_height_grid(const HeightGrid& grid, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "ncols " << grid.width << "\n";
  out << "nrows " << grid.height << "\n";
  out << "xllcorner " << fmt_double(grid.origin_x) << "\n";
  out << "yllcorner " << fmt_double(grid.origin_y) << "\n";
  out << "cellsize " << fmt_double(grid.cell_size) << "\n";
  out << "NODATA_value " << fmt_double(kNoData) << "\n";
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      if (c) out << ' ';
      const auto& v = grid.at(r, c);
      out << fmt_double(v ? *v : kNoData);
    }
    out << "\n";
  }
}

std::vector<DepthContour> load_contours(const std::filesystem::path& path) {
  const CsvFile csv = read_csv(path);
  const std::vector<std::string> expected = {"depth", "x", "y", "polyline_id"};
  if (csv.header != expected) {
    throw FormatError("contours " + path.string() +
                      ": malformed header (expected depth,x,y,polyline_id)");
  }
  std::map<std::string, DepthContour> lines;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where =
        "contours " + path.string() + " row " + std::to_string(csv.row_numbers[r]);
    if (row.size() != 4) throw FormatError(where + ": expected 4 fields");
    const auto depth = parse_double(row[0]);
    const auto x = parse_double(row[1]);
    const auto y = parse_double(row[2]);
    if (!depth || !x || !y) throw FormatError(where + ": unparseable number");
    if (*depth > 0.0) throw ValidationError(where + ": contour depth must be <= 0");
    const std::string id = trim(row[3]);
    if (!lines.count(id)) order.push_back(id);
    DepthContour& c = lines[id];
    if (c.vertices.empty()) {
      c.depth = *depth;
    } else if (c.depth != *depth) {
      throw ValidationError(where + ": polyline " + id + " mixes depths");
    }
    c.vertices.emplace_back(*x, *y);
  }
  std::vector<DepthContour> out;
  for (const auto& id : order) {
    if (lines[id].vertices.size() < 2) {
      throw ValidationError("contours " + path.string() + ": polyline " + id +
                            " has fewer than 2 vertices");
    }
    out.push_back(lines[id]);
  }
  return out;
}

HeightGrid merge_bathymetry(const HeightGrid& grid, const std::vector<DepthContour>& contours,
                            const MergeOptions& options) {
  struct Vertex {
    double x, y, depth;
  };
  std::vector<Vertex> verts;
  for (const auto& c : contours) {
    for (const auto& [x, y] : c.vertices) verts.push_back({x, y, c.depth});
  }
  HeightGrid out = grid;
  std::vector<std::string> uncovered;
  const double r2 = options.search_radius * options.search_radius;
  for (std::size_t row = 0; row < grid.height; ++row) {
    for (std::size_t col = 0; col < grid.width; ++col) {
      if (grid.at(row, col)) continue;
      const double cx = grid.cell_x(col);
      const double cy = grid.cell_y(row);
      // (distance^2, depth) of candidates within radius
      std::vector<std::pair<double, double>> near;
      for (const auto& v : verts) {
        const double dx = v.x - cx;
        const double dy = v.y - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= r2) near.emplace_back(d2, v.depth);
      }
      if (near.empty()) {
        if (uncovered.size() < 16) {
          uncovered.push_back("(" + std::to_string(row) + "," + std::to_string(col) + ")");
        }
        continue;
      }
      const std::size_t k = std::min<std::size_t>(options.k_nearest, near.size());
      std::partial_sort(near.begin(), near.begin() + k, near.end());
      if (near.front().first == 0.0) {
        out.at(row, col) = near.front().second;
        continue;
      }
      double wsum = 0.0, acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double w = 1.0 / near[i].first;
        wsum += w;
        acc += w * near[i].second;
      }
      out.at(row, col) = std::min(0.0, acc / wsum);
    }
  }
  if (!uncovered.empty()) {
    std::string list;
    for (const auto& c : uncovered) list += (list.empty() ? "" : ", ") + c;
    throw ValidationError("merge_bathymetry: cells without contour coverage within " +
                          std::to_string(options.search_radius) + " m: " + list);
  }
  return out;
}

QuantizedChunkSet quantize_int16(const HeightGrid& grid, double scale) {
  if (scale <= 0.0) throw ConfigError("quantize_int16: scale must be > 0");
  if (grid.values.empty()) throw ValidationError("quantize_int16: empty grid");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& v : grid.values) {
    if (!v) throw ValidationError("quantize_int16: grid has missing cells; merge first");
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
  }
  QuantizedChunkSet set;
  set.scale = scale;
  set.offset = 0.5 * (lo + hi);
  set.grid_width = grid.width;
  set.grid_height = grid.height;
  set.origin_x = grid.origin_x;
  set.origin_y = grid.origin_y;
  set.cell_size = grid.cell_size;
  const double half_span = 0.5 * (hi - lo);
  const double max_count = std::round(half_span / scale);
  if (max_count > 32767.0) {
    const double min_scale = half_span / 32767.0;
    throw NumericError("quantize_int16: range " + fmt_double(hi - lo) + " m at scale " +
                       fmt_double(scale) + " overflows int16; need scale >= " +
                       fmt_double(min_scale));
  }
  set.counts.resize(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    set.counts[i] = static_cast<std::int16_t>(std::lround((*grid.values[i] - set.offset) / scale));
  }
  return set;
}

void chunk_split(QuantizedChunkSet& set, std::size_t chunk_size) {
  if (chunk_size < 1) throw ConfigError("chunk_split: chunk size must be >= 1");
  set.chunk_size = chunk_size;
  set.chunks_x = (set.grid_width + chunk_size - 1) / chunk_size;
  set.chunks_y = (set.grid_height + chunk_size - 1) / chunk_size;
  set.padded_width = set.chunks_x * chunk_size;
  set.padded_height = set.chunks_y * chunk_size;
  set.chunks.assign(set.chunks_x * set.chunks_y,
                    std::vector<std::int16_t>(chunk_size * chunk_size));
  for (std::size_t cy = 0; cy < set.chunks_y; ++cy) {
    for (std::size_t cx = 0; cx < set.chunks_x; ++cx) {
      auto& tile = set.chunks[cy * set.chunks_x + cx];
      for (std::size_t r = 0; r < chunk_size; ++r) {
        // edge replication beyond the original extent
        const std::size_t src_r = std::min(cy * chunk_size + r, set.grid_height - 1);
        for (std::size_t c = 0; c < chunk_size; ++c) {
          const std::size_t src_c = std::min(cx * chunk_size + c, set.grid_width - 1);
          tile[r * chunk_size + c] = set.counts[src_r * set.grid_width + src_c];
        }
      }
    }
  }
}

std::vector<std::int16_t> reassemble_counts(const QuantizedChunkSet& set) {
  if (set.chunk_size == 0) return set.counts;
  std::vector<std::int16_t> out(set.grid_width * set.grid_height);
  for (std::size_t cy = 0; cy < set.chunks_y; ++cy) {
    for (std::size_t cx = 0; cx < set.chunks_x; ++cx) {
      const auto& tile = set.chunks[cy * set.chunks_x + cx];
      for (std::size_t r = 0; r < set.chunk_size; ++r) {
        const std::size_t gr = cy * set.chunk_size + r;
        if (gr >= set.grid_height) break;
        for (std::size_t c = 0; c < set.chunk_size; ++c) {
          const std::size_t gc = cx * set.chunk_size + c;
          if (gc >= set.grid_width) break;
          out[gr * set.grid_width + gc] = tile[r * set.chunk_size + c];
        }
      }
    }
  }
  return out;
}

HeightGrid chunk_reassemble(const QuantizedChunkSet& set) {
  const std::vector<std::int16_t> counts = reassemble_counts(set);
  HeightGrid g;
  g.origin_x = set.origin_x;
  g.origin_y = set.origin_y;
  g.cell_size = set.cell_size;
  g.width = set.grid_width;
  g.height = set.grid_height;
  g.values.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    g.values[i] = static_cast<double>(counts[i]) * set.scale + set.offset;
  }
  return g;
}

void save_chunk_set(const QuantizedChunkSet& set, const std::filesystem::path& dir) {
  if (set.chunk_size == 0) throw ConfigError("save_chunk_set: call chunk_split first");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  json sidecar;
  sidecar["scale"] = set.scale;
  sidecar["offset"] = set.offset;
  sidecar["chunk_size"] = set.chunk_size;
  sidecar["grid_width"] = set.grid_width;
  sidecar["grid_height"] = set.grid_height;
  sidecar["chunks_x"] = set.chunks_x;
  sidecar["chunks_y"] = set.chunks_y;
  sidecar["origin_x"] = set.origin_x;
  sidecar["origin_y"] = set.origin_y;
  sidecar["cell_size"] = set.cell_size;
  sidecar["chunks"] = json::array();
  for (std::size_t cy = 0; cy < set.chunks_y; ++cy) {
    for (std::size_t cx = 0; cx < set.chunks_x; ++cx) {
      const std::string name =
          "chunk_" + std::to_string(cx) + "_" + std::to_string(cy) + ".i16";
      sidecar["chunks"].push_back({{"x", cx}, {"y", cy}, {"file", name}});
      auto out = open_output(dir / name);
      const auto& tile = set.chunks[cy * set.chunks_x + cx];
      for (std::int16_t v : tile) {
        const auto u = static_cast<std::uint16_t>(v);
        const char bytes[2] = {static_cast<char>(u & 0xff), static_cast<char>(u >> 8)};
        out.write(bytes, 2);
      }
    }
  }
  auto meta = open_output(dir / "chunks.json");
  meta << sidecar.dump(2) << "\n";
}

QuantizedChunkSet load_chunk_set(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "chunks.json");
  if (!meta_in) throw IoError("cannot open " + (dir / "chunks.json").string());
  json sidecar;
  try {
    sidecar = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw FormatError("chunk sidecar: " + std::string(e.what()));
  }
  QuantizedChunkSet set;
  set.scale = sidecar.at("scale").get<double>();
  set.offset = sidecar.at("offset").get<double>();
  set.chunk_size = sidecar.at("chunk_size").get<std::size_t>();
  set.grid_width = sidecar.at("grid_width").get<std::size_t>();
  set.grid_height = sidecar.at("grid_height").get<std::size_t>();
  set.chunks_x = sidecar.at("chunks_x").get<std::size_t>();
  set.chunks_y = sidecar.at("chunks_y").get<std::size_t>();
  set.origin_x = sidecar.at("origin_x").get<double>();
  set.origin_y = sidecar.at("origin_y").get<double>();
  set.cell_size = sidecar.at("cell_size").get<double>();
  set.padded_width = set.chunks_x * set.chunk_size;
  set.padded_height = set.chunks_y * set.chunk_size;
  set.chunks.assign(set.chunks_x * set.chunks_y,
                    std::vector<std::int16_t>(set.chunk_size * set.chunk_size));
  for (const auto& entry : sidecar.at("chunks")) {
    const auto cx = entry.at("x").get<std::size_t>();
    const auto cy = entry.at("y").get<std::size_t>();
    const std::filesystem::path file = dir / entry.at("file").get<std::string>();
    const std::string bytes = read_file_bytes(file);
    auto& tile = set.chunks[cy * set.chunks_x + cx];
    if (bytes.size() != tile.size() * 2) {
      throw FormatError("chunk file " + file.string() + ": unexpected size");
    }
    for (std::size_t i = 0; i < tile.size(); ++i) {
      const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
      const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
      tile[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo) |
                                          (static_cast<std::uint16_t>(hi) << 8));
    }
  }
  // reconstruct the flat counts so reassembly works either way
  QuantizedChunkSet tmp = set;
  set.counts = reassemble_counts(tmp);
  return set;
}

}  // namespace windtwin
