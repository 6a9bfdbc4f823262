#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windtwin/time.hpp"

namespace windtwin {

enum class Channel { wind_speed, wind_direction, nacelle_direction, active_power };

// Wind and nacelle directions use circular statistics everywhere.
bool is_angular(Channel c);

std::string channel_name(Channel c);
std::optional<Channel> channel_from_name(const std::string& name);

struct Sample {
  Timestamp timestamp = 0;
  std::optional<double> value;  // nullopt = missing measurement
};

// Samples sorted by timestamp, no duplicates. Possibly non-equidistant.
struct TimeSeries {
  Channel channel = Channel::active_power;
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

enum class QueryMode {
  realtime,  // latest measurement at or before t (persistence bridge)
  historic   // linear interpolation between bracketing measurements
};

// Latest present value at <= t (realtime) or interpolation between the
// bracketing present samples (historic; shorter-arc for angular channels).
// Exact sample timestamps return the sample value in both modes. Outside
// the measured span: realtime holds the last value forward, historic is
// missing before the first and after the last present sample.
std::optional<double> value_at(const TimeSeries& series, Timestamp t, QueryMode mode);

enum class ResamplePolicy { mean, last };

// One sample per clock hour [h, h+1) from the first to the last sampled
// hour. Mean policy averages present in-window samples (circular mean for
// angular channels); last takes the latest present sample. Hours without
// present samples yield missing.
TimeSeries resample_hourly(const TimeSeries& series, ResamplePolicy policy);

struct LoadSummary {
  std::size_t rows = 0;
  std::size_t missing_count = 0;  // rows whose value field did not parse
  std::size_t series_count = 0;
};

using ChannelMap = std::map<Channel, TimeSeries>;

struct ScadaData {
  std::map<std::string, ChannelMap> turbines;
  LoadSummary summary;
};

// SCADA CSV: header `turbine_id,timestamp,channel,value`, ISO-8601 UTC
// timestamps. Timestamps must be strictly increasing per (turbine, channel).
// Rows with unparseable value fields become missing samples and are counted
// in the summary. Leading '#' comment lines are skipped.
ScadaData load_scada(const std::filesystem::path& path);

}  // namespace windtwin
