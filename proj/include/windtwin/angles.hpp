#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace windtwin {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Wraps into [0, 360).
inline double wrap_degrees(double d) {
  double w = std::fmod(d, 360.0);
  if (w < 0.0) w += 360.0;
  // fmod can return 360.0 - eps rounding up to 360 exactly after +=
  if (w >= 360.0) w = 0.0;
  return w;
}

// Signed difference b - a mapped into (-180, 180].
inline double angular_difference(double a, double b) {
  double d = std::fmod(b - a, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

// Interpolates along the shorter arc; frac in [0, 1].
inline double lerp_angle(double a, double b, double frac) {
  return wrap_degrees(a + frac * angular_difference(a, b));
}

// Weighted mean direction via unit-circle components. Weights need not be
// normalized. Degenerate (zero resultant) inputs return 0.
inline double circular_mean(const std::vector<std::pair<double, double>>& angle_weight) {
  double sx = 0.0, sy = 0.0;
  for (const auto& [a, w] : angle_weight) {
    sx += w * std::cos(deg_to_rad(a));
    sy += w * std::sin(deg_to_rad(a));
  }
  if (sx == 0.0 && sy == 0.0) return 0.0;
  return wrap_degrees(rad_to_deg(std::atan2(sy, sx)));
}

}  // namespace windtwin
