#include "windtwin/nwp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "windtwin/angles.hpp"
#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

ForecastSource ForecastSource::meps(const std::string& name) {
  ForecastSource s;
  s.name = name;
  s.issuance_period_h = 6;
  s.lead_min_h = 1;
  s.lead_max_h = 61;
  s.step_h = 1;
  s.horizontal_resolution_m = 2500.0;
  s.has_humidity = true;
  return s;
}

ForecastSource ForecastSource::simra(const std::string& name) {
  ForecastSource s;
  s.name = name;
  s.issuance_period_h = 12;
  s.lead_min_h = 6;
  s.lead_max_h = 18;
  s.step_h = 1;
  s.horizontal_resolution_m = 150.0;
  s.has_humidity = false;
  return s;
}

std::size_t ForecastSet::record_count() const {
  std::size_t n = 0;
  for (const auto& [iss, valids] : records) {
    for (const auto& [valid, nodes] : valids) n += nodes.size();
  }
  return n;
}

ForecastSet load_forecast(const std::filesystem::path& path, const ForecastSource& source,
                          ForecastLoadSummary* summary) {
  CsvReader csv(path);
  ForecastSet out;
  out.source = source;
  ForecastLoadSummary local;
  if (csv.empty_input()) {
    local.empty_input = true;
    if (summary) *summary = local;
    return out;
  }
  const std::vector<std::string> base = {"source", "issuance", "valid", "x", "y", "height",
                                         "wind_speed", "wind_direction", "temperature", "pressure"};
  bool has_humidity_col = false;
  if (csv.header().size() == base.size() + 1 && csv.header().back() == "humidity") {
    has_humidity_col = true;
  } else if (csv.header().size() != base.size()) {
    throw FormatError("forecast " + path.string() + ": unexpected column count " +
                      std::to_string(csv.header().size()));
  }
  for (std::size_t c = 0; c < base.size(); ++c) {
    if (csv.header()[c] != base[c]) {
      throw FormatError("forecast " + path.string() + ": unknown column '" + csv.header()[c] +
                        "' (expected '" + base[c] + "')");
    }
  }

  std::set<std::tuple<Timestamp, Timestamp, double, double, double>> seen;
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    const std::string where = "forecast " + path.string() + " row " + std::to_string(lineno);
    if (row.size() != csv.header().size()) throw FormatError(where + ": field count mismatch");
    const Timestamp issuance = parse_iso8601_or_throw(trim(row[1]), where);
    const Timestamp valid = parse_iso8601_or_throw(trim(row[2]), where);
    const Timestamp delta = valid - issuance;
    if (delta % kSecondsPerHour != 0) {
      throw ValidationError(where + ": lead is not a whole number of hours");
    }
    const auto lead = static_cast<int>(delta / kSecondsPerHour);
    if (lead < source.lead_min_h || lead > source.lead_max_h || lead % source.step_h != 0) {
      throw ValidationError(where + ": lead " + std::to_string(lead) +
                            " h outside declared range [" + std::to_string(source.lead_min_h) +
                            ", " + std::to_string(source.lead_max_h) + "]");
    }
    NodeSample node;
    auto need = [&](std::size_t i, const char* what) {
      auto v = parse_double(row[i]);
      if (!v) throw FormatError(where + ": bad " + std::string(what) + " '" + trim(row[i]) + "'");
      return *v;
    };
    node.x = need(3, "x");
    node.y = need(4, "y");
    node.height = need(5, "height");
    node.wind_speed = need(6, "wind_speed");
    node.wind_direction = wrap_degrees(need(7, "wind_direction"));
    node.temperature = need(8, "temperature");
    node.pressure = need(9, "pressure");
    if (has_humidity_col) {
      node.humidity = parse_double(row[10]);  // blank allowed
    }
    if (!seen.insert({issuance, valid, node.x, node.y, node.height}).second) {
      throw ValidationError(where + ": duplicate (issuance, valid, node, height)");
    }
    out.records[issuance][valid].push_back(node);
    ++local.rows;
  }

  // Node sets must agree across the valid times of one issuance.
  for (const auto& [iss, valids] : out.records) {
    std::set<std::tuple<double, double, double>> reference;
    bool first = true;
    for (const auto& [valid, nodes] : valids) {
      std::set<std::tuple<double, double, double>> keys;
      for (const auto& n : nodes) keys.insert({n.x, n.y, n.height});
      if (first) {
        reference = keys;
        first = false;
      } else if (keys != reference) {
        throw ValidationError("forecast " + path.string() + ": issuance " + format_iso8601(iss) +
                              " has inconsistent grid nodes across valid times");
      }
    }
  }
  if (summary) *summary = local;
  return out;
}

namespace {

struct Column {
  double x = 0.0;
  double y = 0.0;
  double dist2 = 0.0;
  // (height, node index) sorted by height
  std::vector<std::pair<double, const NodeSample*>> levels;
};

std::vector<Column> build_columns(const std::vector<NodeSample>& nodes, double tx, double ty) {
  std::vector<Column> cols;
  for (const auto& n : nodes) {
    auto it = std::find_if(cols.begin(), cols.end(),
                           [&](const Column& c) { return c.x == n.x && c.y == n.y; });
    if (it == cols.end()) {
      cols.push_back({n.x, n.y, 0.0, {}});
      it = cols.end() - 1;
    }
    it->levels.emplace_back(n.height, &n);
  }
  for (auto& c : cols) {
    std::sort(c.levels.begin(), c.levels.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double dx = c.x - tx;
    const double dy = c.y - ty;
    c.dist2 = dx * dx + dy * dy;
  }
  std::sort(cols.begin(), cols.end(), [](const Column& a, const Column& b) {
    return std::tie(a.dist2, a.x, a.y) < std::tie(b.dist2, b.x, b.y);
  });
  return cols;
}

struct LevelValues {
  double wind_speed = 0.0;
  double wind_direction = 0.0;
  double temperature = 0.0;
  double pressure = 0.0;
  std::optional<double> humidity;
};

LevelValues values_of(const NodeSample& n) {
  return {n.wind_speed, n.wind_direction, n.temperature, n.pressure, n.humidity};
}

// Linear interpolation between the two bracketing height levels; clamps to
// the nearest level outside the column's height range. Direction follows the
// shorter arc.
LevelValues column_at_height(const Column& col, double h) {
  const auto& lv = col.levels;
  if (lv.size() == 1 || h <= lv.front().first) return values_of(*lv.front().second);
  if (h >= lv.back().first) return values_of(*lv.back().second);
  std::size_t i = 0;
  while (i + 1 < lv.size() && lv[i + 1].first < h) ++i;
  if (lv[i + 1].first == h) return values_of(*lv[i + 1].second);
  const NodeSample& a = *lv[i].second;
  const NodeSample& b = *lv[i + 1].second;
  const double frac = (h - lv[i].first) / (lv[i + 1].first - lv[i].first);
  LevelValues out;
  out.wind_speed = a.wind_speed + frac * (b.wind_speed - a.wind_speed);
  out.wind_direction = lerp_angle(a.wind_direction, b.wind_direction, frac);
  out.temperature = a.temperature + frac * (b.temperature - a.temperature);
  out.pressure = a.pressure + frac * (b.pressure - a.pressure);
  if (a.humidity && b.humidity) {
    out.humidity = *a.humidity + frac * (*b.humidity - *a.humidity);
  }
  return out;
}

HubWeather to_weather(const LevelValues& v) {
  HubWeather w;
  w.wind_speed = v.wind_speed;
  w.wind_direction = v.wind_direction;
  w.air.temperature_k = v.temperature;
  w.air.pressure_pa = v.pressure;
  w.air.relative_humidity = v.humidity;
  return w;
}

HubWeather sample_point(const std::vector<NodeSample>& nodes, const TurbinePosition& turbine,
                        SamplingStrategy strategy) {
  std::vector<Column> cols = build_columns(nodes, turbine.x, turbine.y);
  const double hub = turbine.hub_height;
  if (strategy == SamplingStrategy::nearest || cols.size() == 1 || cols.front().dist2 == 0.0) {
    const Column& c = cols.front();
    if (strategy == SamplingStrategy::nearest) {
      // closest level, no vertical interpolation
      const auto best = std::min_element(c.levels.begin(), c.levels.end(),
                                         [&](const auto& a, const auto& b) {
                                           return std::abs(a.first - hub) < std::abs(b.first - hub);
                                         });
      return to_weather(values_of(*best->second));
    }
    return to_weather(column_at_height(c, hub));
  }
  const std::size_t k = std::min<std::size_t>(4, cols.size());
  double wsum = 0.0;
  LevelValues acc;
  acc.humidity = 0.0;
  bool humidity_everywhere = true;
  std::vector<std::pair<double, double>> dir_weights;
  for (std::size_t i = 0; i < k; ++i) {
    const LevelValues v = column_at_height(cols[i], hub);
    const double w = 1.0 / cols[i].dist2;
    wsum += w;
    acc.wind_speed += w * v.wind_speed;
    acc.temperature += w * v.temperature;
    acc.pressure += w * v.pressure;
    if (v.humidity && humidity_everywhere) {
      *acc.humidity += w * *v.humidity;
    } else {
      humidity_everywhere = false;
    }
    dir_weights.emplace_back(v.wind_direction, w);
  }
  LevelValues out;
  out.wind_speed = acc.wind_speed / wsum;
  out.temperature = acc.temperature / wsum;
  out.pressure = acc.pressure / wsum;
  out.humidity = humidity_everywhere ? std::optional<double>(*acc.humidity / wsum) : std::nullopt;
  out.wind_direction = circular_mean(dir_weights);
  return to_weather(out);
}

}  // namespace

HubWeatherSeries sample_at_hub(const ForecastSet& fcst, const TurbinePosition& turbine,
                               SamplingStrategy strategy) {
  HubWeatherSeries out;
  out.turbine_id = turbine.id;
  if (fcst.records.empty()) return out;

  for (const auto& [iss, valids] : fcst.records) {
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (const auto& n : valids.begin()->second) {
      min_x = std::min(min_x, n.x);
      max_x = std::max(max_x, n.x);
      min_y = std::min(min_y, n.y);
      max_y = std::max(max_y, n.y);
    }
    if (turbine.x < min_x || turbine.x > max_x || turbine.y < min_y || turbine.y > max_y) {
      throw ValidationError("sample_at_hub: turbine " + turbine.id +
                            " outside the forecast grid bounding box (issuance " +
                            format_iso8601(iss) + ")");
    }
  }

  for (const auto& [iss, valids] : fcst.records) {
    for (const auto& [valid, nodes] : valids) {
      HubWeatherEntry e;
      e.issuance = iss;
      e.lead_h = static_cast<int>((valid - iss) / kSecondsPerHour);
      e.weather = sample_point(nodes, turbine, strategy);
      out.entries.push_back(e);
    }
  }
  return out;
}

std::map<int, std::map<Timestamp, HubWeather>> group_by_lead(
    const HubWeatherSeries& series, const std::vector<Timestamp>& targets) {
  const std::set<Timestamp> wanted(targets.begin(), targets.end());
  std::map<int, std::map<Timestamp, HubWeather>> out;
  for (const auto& e : series.entries) {
    const Timestamp target = e.issuance + static_cast<Timestamp>(e.lead_h) * kSecondsPerHour;
    if (wanted.count(target)) out[e.lead_h][target] = e.weather;
  }
  return out;
}

}  // namespace windtwin
