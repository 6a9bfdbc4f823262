#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace windtwin {

// Seconds since the Unix epoch, UTC. Second resolution throughout.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

// Accepts "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DDTHH:MMZ".
std::optional<Timestamp> parse_iso8601(const std::string& text);

// Throws FormatError with `context` in the message when the text does not parse.
Timestamp parse_iso8601_or_throw(const std::string& text, const std::string& context);

// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

// Largest hour-aligned timestamp <= t.
Timestamp hour_floor(Timestamp t);

inline bool is_hour_aligned(Timestamp t) { return hour_floor(t) == t; }

}  // namespace windtwin
