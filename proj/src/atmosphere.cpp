#include "windtwin/atmosphere.hpp"

#include <cmath>
#include <string>

#include "windtwin/errors.hpp"

namespace windtwin {

using namespace constants;

double density_dry(const AtmosphericState& state) {
  if (state.temperature_k <= 0.0) {
    throw NumericError("density_dry: temperature must be > 0 K, got " +
                       std::to_string(state.temperature_k));
  }
  if (state.pressure_pa <= 0.0) {
    throw NumericError("density_dry: pressure must be > 0 Pa");
  }
  return state.pressure_pa * kMolarMassDryAir / (kGasConstant * state.temperature_k);
}

double saturation_pressure(double temperature_k) {
  // The T - 35.85 denominator is the celsius-form constant 237.3 shifted to
  // kelvin; it keeps the curve anchored at 611 Pa for 0 degC.
  if (temperature_k <= 35.85) {
    throw NumericError("saturation_pressure: temperature " + std::to_string(temperature_k) +
                       " K at or below the 35.85 K singularity");
  }
  return 611.0 * std::pow(10.0, 7.5 * (temperature_k - 273.15) / (temperature_k - 35.85));
}

double density_humid(const AtmosphericState& state) {
  if (!state.relative_humidity) {
    throw ConfigError("density_humid: relative humidity not available");
  }
  const double phi = *state.relative_humidity;
  if (phi < 0.0 || phi > 1.0) {
    throw NumericError("density_humid: relative humidity " + std::to_string(phi) +
                       " outside [0, 1]");
  }
  if (state.temperature_k <= 0.0) {
    throw NumericError("density_humid: temperature must be > 0 K");
  }
  const double p_sat = saturation_pressure(state.temperature_k);
  const double p_vapour = phi * p_sat;
  if (p_vapour > state.pressure_pa) {
    throw NumericError("density_humid: vapour partial pressure exceeds total pressure");
  }
  return ((state.pressure_pa - p_vapour) * kMolarMassDryAir + p_vapour * kMolarMassVapour) /
         (kGasConstant * state.temperature_k);
}

}  // namespace windtwin
