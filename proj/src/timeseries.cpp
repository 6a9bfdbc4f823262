#include "windtwin/timeseries.hpp"

#include <algorithm>
#include <cmath>

#include "windtwin/angles.hpp"
#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

bool is_angular(Channel c) {
  return c == Channel::wind_direction || c == Channel::nacelle_direction;
}

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::wind_speed: return "wind_speed";
    case Channel::wind_direction: return "wind_direction";
    case Channel::nacelle_direction: return "nacelle_direction";
    case Channel::active_power: return "active_power";
  }
  return "?";
}

std::optional<Channel> channel_from_name(const std::string& name) {
  if (name == "wind_speed") return Channel::wind_speed;
  if (name == "wind_direction") return Channel::wind_direction;
  if (name == "nacelle_direction") return Channel::nacelle_direction;
  if (name == "active_power") return Channel::active_power;
  return std::nullopt;
}

namespace {

// Index of the last present sample with timestamp <= t, or npos.
std::size_t last_present_at_or_before(const std::vector<Sample>& samples, Timestamp t) {
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](Timestamp lhs, const Sample& s) { return lhs < s.timestamp; });
  while (it != samples.begin()) {
    --it;
    if (it->value) return static_cast<std::size_t>(it - samples.begin());
  }
  return static_cast<std::size_t>(-1);
}

std::size_t first_present_at_or_after(const std::vector<Sample>& samples, Timestamp t) {
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const Sample& s, Timestamp rhs) { return s.timestamp < rhs; });
  for (; it != samples.end(); ++it) {
    if (it->value) return static_cast<std::size_t>(it - samples.begin());
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

std::optional<double> value_at(const TimeSeries& series, Timestamp t, QueryMode mode) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  const auto& s = series.samples;
  const std::size_t lo = last_present_at_or_before(s, t);
  if (mode == QueryMode::realtime) {
    if (lo == npos) return std::nullopt;
    return s[lo].value;
  }
  if (lo != npos && s[lo].timestamp == t) return s[lo].value;
  const std::size_t hi = first_present_at_or_after(s, t);
  if (lo == npos || hi == npos) return std::nullopt;
  const double frac = static_cast<double>(t - s[lo].timestamp) /
                      static_cast<double>(s[hi].timestamp - s[lo].timestamp);
  const double a = *s[lo].value;
  const double b = *s[hi].value;
  if (is_angular(series.channel)) return lerp_angle(a, b, frac);
  return a + frac * (b - a);
}

TimeSeries resample_hourly(const TimeSeries& series, ResamplePolicy policy) {
  TimeSeries out;
  out.channel = series.channel;
  if (series.empty()) return out;
  const Timestamp first_hour = hour_floor(series.samples.front().timestamp);
  const Timestamp last_hour = hour_floor(series.samples.back().timestamp);
  std::size_t i = 0;
  for (Timestamp h = first_hour; h <= last_hour; h += kSecondsPerHour) {
    Sample res;
    res.timestamp = h;
    std::vector<std::pair<double, double>> angular;
    double sum = 0.0;
    std::size_t count = 0;
    std::optional<double> last;
    while (i < series.samples.size() && series.samples[i].timestamp < h + kSecondsPerHour) {
      const Sample& s = series.samples[i];
      if (s.value) {
        if (is_angular(series.channel)) angular.emplace_back(*s.value, 1.0);
        sum += *s.value;
        ++count;
        last = s.value;
      }
      ++i;
    }
    if (count > 0) {
      if (policy == ResamplePolicy::last) {
        res.value = last;
      } else if (is_angular(series.channel)) {
        res.value = circular_mean(angular);
      } else {
        res.value = sum / static_cast<double>(count);
      }
    }
    out.samples.push_back(res);
  }
  return out;
}

ScadaData load_scada(const std::filesystem::path& path) {
  CsvReader csv(path);
  const std::vector<std::string> expected = {"turbine_id", "timestamp", "channel", "value"};
  if (csv.header() != expected) {
    throw FormatError("scada " + path.string() +
                      ": malformed header (expected turbine_id,timestamp,channel,value)");
  }
  ScadaData out;
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    const std::string where = "scada " + path.string() + " row " + std::to_string(lineno);
    if (row.size() != 4) throw FormatError(where + ": expected 4 fields");
    const std::string turbine = trim(row[0]);
    if (turbine.empty()) throw ValidationError(where + ": empty turbine id");
    const Timestamp t = parse_iso8601_or_throw(trim(row[1]), where);
    const auto channel = channel_from_name(trim(row[2]));
    if (!channel) throw FormatError(where + ": unknown channel '" + trim(row[2]) + "'");

    TimeSeries& series = out.turbines[turbine][*channel];
    series.channel = *channel;
    if (!series.samples.empty()) {
      const Timestamp prev = series.samples.back().timestamp;
      if (t == prev) {
        throw ValidationError(where + ": duplicate timestamp for " + turbine + "/" +
                              channel_name(*channel));
      }
      if (t < prev) {
        throw ValidationError(where + ": non-monotonic timestamp for " + turbine + "/" +
                              channel_name(*channel));
      }
    }
    Sample s;
    s.timestamp = t;
    s.value = parse_double(row[3]);
    if (s.value && is_angular(*channel)) s.value = wrap_degrees(*s.value);
    if (!s.value) ++out.summary.missing_count;
    series.samples.push_back(s);
    ++out.summary.rows;
  }
  for (const auto& [id, channels] : out.turbines) out.summary.series_count += channels.size();
  return out;
}

}  // namespace windtwin
