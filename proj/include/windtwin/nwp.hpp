#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windtwin/layout.hpp"
#include "windtwin/time.hpp"
#include "windtwin/weather.hpp"

namespace windtwin {

struct ForecastSource {
  std::string name;
  int issuance_period_h = 6;
  int lead_min_h = 1;
  int lead_max_h = 61;
  int step_h = 1;
  double horizontal_resolution_m = 2500.0;
  bool has_humidity = false;

  // MEPS-like: issued every 6 h, leads 1..61. SIMRA-like: issued every 12 h,
  // leads 6..18, no humidity.
  static ForecastSource meps(const std::string& name = "meps");
  static ForecastSource simra(const std::string& name = "simra");
};

struct NodeSample {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;  // m above terrain
  double wind_speed = 0.0;
  double wind_direction = 0.0;
  double temperature = 0.0;
  double pressure = 0.0;
  std::optional<double> humidity;
};

struct ForecastSet {
  ForecastSource source;
  // issuance -> valid -> node samples
  std::map<Timestamp, std::map<Timestamp, std::vector<NodeSample>>> records;

  std::size_t record_count() const;
};

struct ForecastLoadSummary {
  std::size_t rows = 0;
  bool empty_input = false;
};

// Forecast CSV: header `source,issuance,valid,x,y,height,<variables>` with
// the humidity column optional. Leads outside the declared range, duplicate
// (issuance, valid, node, height) keys, and inconsistent node sets within an
// issuance are rejected with row numbers.
ForecastSet load_forecast(const std::filesystem::path& path, const ForecastSource& source,
                          ForecastLoadSummary* summary = nullptr);

enum class SamplingStrategy { nearest, idw4 };

struct HubWeatherEntry {
  Timestamp issuance = 0;
  int lead_h = 0;
  HubWeather weather;
};

struct HubWeatherSeries {
  std::string turbine_id;
  std::vector<HubWeatherEntry> entries;  // sorted by (issuance, lead)
};

// Samples the forecast grid at the turbine hub. nearest: closest node at the
// closest height level. idw4: inverse-distance (1/d^2) over the 4 nearest
// columns, linear interpolation between bracketing height levels; wind
// direction is always combined via unit-circle components.
HubWeatherSeries sample_at_hub(const ForecastSet& fcst, const TurbinePosition& turbine,
                               SamplingStrategy strategy);

// lead [h] -> target time -> weather, keeping only targets from `targets`.
// Every value at lead L and target t comes from the issuance at exactly t-L.
std::map<int, std::map<Timestamp, HubWeather>> group_by_lead(
    const HubWeatherSeries& series, const std::vector<Timestamp>& targets);

}  // namespace windtwin
