#pragma once

#include "windtwin/atmosphere.hpp"

namespace windtwin {

// One weather point at hub height.
struct HubWeather {
  double wind_speed = 0.0;      // m/s
  double wind_direction = 0.0;  // deg, meteorological
  AtmosphericState air;
};

}  // namespace windtwin
