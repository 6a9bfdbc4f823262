#pragma once

#include <optional>

namespace windtwin {

struct AtmosphericState {
  double temperature_k = 288.15;
  double pressure_pa = 101325.0;
  std::optional<double> relative_humidity;  // dimensionless, [0, 1]
};

namespace constants {
inline constexpr double kMolarMassDryAir = 0.0289652;   // kg/mol
inline constexpr double kMolarMassVapour = 0.018016;    // kg/mol
inline constexpr double kGasConstant = 8.31446;         // J/(K mol)
inline constexpr double kStandardDensity = 1.225;       // kg/m^3
}  // namespace constants

// Ideal-gas dry-air density p*M_d/(R*T) [kg/m^3].
double density_dry(const AtmosphericState& state);

// Tetens saturation vapour pressure [Pa], kelvin form
// 611 * 10^(7.5*(T - 273.15)/(T - 35.85)); exactly 611 Pa at 273.15 K.
double saturation_pressure(double temperature_k);

// Humid-air density ((p - phi*p_sat)*M_d + phi*p_sat*M_v)/(R*T) [kg/m^3].
// Requires relative_humidity; equals density_dry at phi = 0.
double density_humid(const AtmosphericState& state);

}  // namespace windtwin
